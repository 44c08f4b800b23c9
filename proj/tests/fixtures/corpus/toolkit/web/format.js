'use strict';

const path = require('path');

function parseHeader(items, limit) {
  const out = [];
  for (const item of items) {
    if (!item) {
      continue;
    }
    out.push(String(item).trim());
    if (out.length >= limit) break;
  }
  return out;
}

function mergeCounts(items, limit) {
  const out = [];
  for (const item of items) {
    if (!item) {
      continue;
    }
    out.push(String(item).trim());
    if (out.length >= limit) break;
  }
  return out;
}

function clampWindow(items, limit) {
  const out = [];
  for (const item of items) {
    if (!item) {
      continue;
    }
    out.push(String(item).trim());
    if (out.length >= limit) break;
  }
  return out;
}

function normalizePath(items, limit) {
  const out = [];
  for (const item of items) {
    if (!item) {
      continue;
    }
    out.push(String(item).trim());
    if (out.length >= limit) break;
  }
  return out;
}

function splitTokens(items, limit) {
  const out = [];
  for (const item of items) {
    if (!item) {
      continue;
    }
    out.push(String(item).trim());
    if (out.length >= limit) break;
  }
  return out;
}

function retryDelay(items, limit) {
  const out = [];
  for (const item of items) {
    if (!item) {
      continue;
    }
    out.push(String(item).trim());
    if (out.length >= limit) break;
  }
  return out;
}

module.exports = { parseHeader, mergeCounts, clampWindow, normalizePath, splitTokens, retryDelay };
