#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace lowner {

// Evaluates f(0..count-1) on up to `threads` workers; results are ordered by index.
// Exceptions are rethrown for the lowest failing index.
template <typename T>
std::vector<T> parallel_map(int count, int threads, const std::function<T(int)>& f);

void parallel_for(int count, int threads, const std::function<void(int)>& f);

int hardware_threads();

template <typename T>
std::vector<T> parallel_map(int count, int threads, const std::function<T(int)>& f) {
  std::vector<std::optional<T>> slots(count);
  parallel_for(count, threads, [&](int i) { slots[i].emplace(f(i)); });
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace lowner
