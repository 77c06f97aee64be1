#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <utility>

#include "gridforge/qseries.hpp"

namespace gridforge::detail {

/// Caches fill in blocks so that slowly growing requests do not recompute
/// from scratch each time.
inline std::int64_t round_up_prec(std::int64_t p) {
  constexpr std::int64_t kBlock = 64;
  return std::max<std::int64_t>(kBlock, (p + kBlock - 1) / kBlock * kBlock);
}

/// Memo of series that are only ever requested at growing precision. Readers
/// share the lock; a miss recomputes outside the lock and keeps whichever
/// stored result has the higher precision.
template <typename Key>
class SeriesCache {
 public:
  template <typename Compute>
  QSeries get(const Key& key, std::int64_t prec, Compute&& compute) {
    {
      std::shared_lock lock(mutex_);
      auto it = entries_.find(key);
      if (it != entries_.end() && it->second.prec() >= prec) {
        return it->second.truncate(prec);
      }
    }
    QSeries fresh = compute(prec);
    std::unique_lock lock(mutex_);
    auto [it, inserted] = entries_.try_emplace(key, fresh);
    if (!inserted && it->second.prec() < fresh.prec()) it->second = fresh;
    return fresh.truncate(prec);
  }

 private:
  std::shared_mutex mutex_;
  std::map<Key, QSeries> entries_;
};

}  // namespace gridforge::detail
