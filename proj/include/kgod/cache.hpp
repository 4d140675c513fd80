#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <list>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>

namespace kgod {

struct CacheStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
};

// LRU cache with per-call TTL and single-flight computation: concurrent
// misses on one key run compute once and share its result. A TTL of zero
// bypasses the cache entirely.
template <class V>
class Cache {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit Cache(std::size_t capacity, Clock clock = [] { return std::chrono::steady_clock::now(); })
      : capacity_(capacity), clock_(std::move(clock)) {}

  template <class F>
  std::pair<V, bool> get_or_compute(const std::string& key, std::chrono::duration<double> ttl, F&& compute) {
    if (ttl.count() <= 0 || capacity_ == 0) {
      {
        std::lock_guard lock(mu_);
        ++stats_.misses;
      }
      return {compute(), false};
    }

    std::unique_lock lock(mu_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      if (clock_() - it->second.stored_at < ttl) {
        lru_.splice(lru_.begin(), lru_, it->second.pos);
        ++stats_.hits;
        return {it->second.value, true};
      }
      lru_.erase(it->second.pos);
      entries_.erase(it);
    }
    if (auto it = inflight_.find(key); it != inflight_.end()) {
      std::shared_future<V> pending = it->second;
      ++stats_.hits;
      lock.unlock();
      return {pending.get(), true};
    }

    ++stats_.misses;
    std::promise<V> promise;
    inflight_.emplace(key, promise.get_future().share());
    const std::uint64_t generation = generation_;
    lock.unlock();

    try {
      V value = compute();
      lock.lock();
      inflight_.erase(key);
      if (generation == generation_) store(key, value);
      lock.unlock();
      promise.set_value(value);
      return {std::move(value), false};
    } catch (...) {
      lock.lock();
      inflight_.erase(key);
      lock.unlock();
      promise.set_exception(std::current_exception());
      throw;
    }
  }

  // Drops every entry; computations already running are not stored.
  void clear() {
    std::lock_guard lock(mu_);
    entries_.clear();
    lru_.clear();
    ++generation_;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

  std::size_t capacity() const { return capacity_; }

  CacheStats stats() const {
    std::lock_guard lock(mu_);
    return stats_;
  }

 private:
  struct Entry {
    V value;
    std::chrono::steady_clock::time_point stored_at;
    std::list<std::string>::iterator pos;
  };

  void store(const std::string& key, const V& value) {
    lru_.push_front(key);
    entries_[key] = Entry{value, clock_(), lru_.begin()};
    while (entries_.size() > capacity_) {
      entries_.erase(lru_.back());
      lru_.pop_back();
    }
  }

  std::size_t capacity_;
  Clock clock_;
  mutable std::mutex mu_;
  std::list<std::string> lru_;  // most recent first
  std::unordered_map<std::string, Entry> entries_;
  std::unordered_map<std::string, std::shared_future<V>> inflight_;
  std::uint64_t generation_ = 0;
  CacheStats stats_;
};

}  // namespace kgod
