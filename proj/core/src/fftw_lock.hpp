#pragma once

#include <mutex>

namespace heis::detail {

// FFTW planning and plan destruction are not thread-safe; every call site shares this lock.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace heis::detail
