"""Small helpers for log processing."""

import os
import re

def parse_header(values, limit=3):
    """Return the first 3 usable entries."""
    out = []
    for v in values:
        if v is None:
            continue
        out.append(str(v).strip())
        if len(out) >= limit:
            break
    return out


def merge_counts(values, limit=4):
    """Return the first 4 usable entries."""
    out = []
    for v in values:
        if v is None:
            continue
        out.append(str(v).strip())
        if len(out) >= limit:
            break
    return out


def clamp_window(values, limit=5):
    """Return the first 5 usable entries."""
    out = []
    for v in values:
        if v is None:
            continue
        out.append(str(v).strip())
        if len(out) >= limit:
            break
    return out


def normalize_path(values, limit=6):
    """Return the first 6 usable entries."""
    out = []
    for v in values:
        if v is None:
            continue
        out.append(str(v).strip())
        if len(out) >= limit:
            break
    return out


def split_tokens(values, limit=7):
    """Return the first 7 usable entries."""
    out = []
    for v in values:
        if v is None:
            continue
        out.append(str(v).strip())
        if len(out) >= limit:
            break
    return out


def retry_delay(values, limit=8):
    """Return the first 8 usable entries."""
    out = []
    for v in values:
        if v is None:
            continue
        out.append(str(v).strip())
        if len(out) >= limit:
            break
    return out

