"""
Window Cache Module

Memo table for compiled windows f_i^n, keyed by
(schedule fingerprint, anchor index, window length). It provides:
- Thread-safe get/put shared by detector worker threads
- Least-recently-used eviction bounded by NDS_WINDOW_CACHE_SIZE
- Hit/miss/eviction statistics and explicit cleanup
"""

import gc
import logging
import threading
from collections import OrderedDict
from datetime import datetime
from typing import Any, Dict, Hashable, Optional

import config

# Configure logging
logger = logging.getLogger(__name__)


class WindowCache:
    """Synchronized LRU table of compiled windows"""

    def __init__(self, max_size: Optional[int] = None):
        self.max_size = config.WINDOW_CACHE_SIZE if max_size is None else max_size
        self._entries: 'OrderedDict[Hashable, Any]' = OrderedDict()
        self._lock = threading.Lock()
        self.cache_stats = self._fresh_stats()

    @staticmethod
    def _fresh_stats() -> Dict[str, Any]:
        return {
            'hits': 0,
            'misses': 0,
            'evictions': 0,
            'clears': 0,
            'last_clear': None,
        }

    def get(self, key: Hashable) -> Optional[Any]:
        with self._lock:
            if key not in self._entries:
                self.cache_stats['misses'] += 1
                return None
            self._entries.move_to_end(key)
            self.cache_stats['hits'] += 1
            return self._entries[key]

    def put(self, key: Hashable, window: Any) -> None:
        if self.max_size <= 0:
            return
        with self._lock:
            self._entries[key] = window
            self._entries.move_to_end(key)
            while len(self._entries) > self.max_size:
                self._entries.popitem(last=False)
                self.cache_stats['evictions'] += 1

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def clear(self) -> int:
        """
        Drop every memoized window

        Returns:
            int: Number of windows released
        """
        with self._lock:
            released = len(self._entries)
            self._entries.clear()
            self.cache_stats['clears'] += 1
            self.cache_stats['last_clear'] = datetime.now()
        collected = gc.collect()
        logger.info(f"[CACHE] Released {released} windows, collected {collected} objects")
        return released

    def get_cache_stats(self) -> Dict[str, Any]:
        """Get current cache statistics"""
        with self._lock:
            stats = self.cache_stats.copy()
            stats['size'] = len(self._entries)
        return stats

    def reset_stats(self) -> None:
        """Reset cache statistics"""
        with self._lock:
            self.cache_stats = self._fresh_stats()
        logger.info("[CACHE] Cache statistics reset")


# Global window cache instance
window_cache = WindowCache()
