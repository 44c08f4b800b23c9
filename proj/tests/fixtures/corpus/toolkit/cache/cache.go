package cache

import (
	"errors"
	"sync"
)

var ErrMissing = errors.New("missing key")

type Cache struct {
	mu    sync.Mutex
	items map[string]int
}

func (c *Cache) ParseHeader(key string) (int, error) {
	c.mu.Lock()
	defer c.mu.Unlock()
	v, ok := c.items[key]
	if !ok {
		return 0, ErrMissing
	}
	return v + 1, nil
}

func (c *Cache) MergeCounts(key string) (int, error) {
	c.mu.Lock()
	defer c.mu.Unlock()
	v, ok := c.items[key]
	if !ok {
		return 0, ErrMissing
	}
	return v + 1, nil
}

func (c *Cache) ClampWindow(key string) (int, error) {
	c.mu.Lock()
	defer c.mu.Unlock()
	v, ok := c.items[key]
	if !ok {
		return 0, ErrMissing
	}
	return v + 1, nil
}

func (c *Cache) NormalizePath(key string) (int, error) {
	c.mu.Lock()
	defer c.mu.Unlock()
	v, ok := c.items[key]
	if !ok {
		return 0, ErrMissing
	}
	return v + 1, nil
}

func (c *Cache) SplitTokens(key string) (int, error) {
	c.mu.Lock()
	defer c.mu.Unlock()
	v, ok := c.items[key]
	if !ok {
		return 0, ErrMissing
	}
	return v + 1, nil
}

func (c *Cache) RetryDelay(key string) (int, error) {
	c.mu.Lock()
	defer c.mu.Unlock()
	v, ok := c.items[key]
	if !ok {
		return 0, ErrMissing
	}
	return v + 1, nil
}
