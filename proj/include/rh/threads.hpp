#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace rh {

// Global worker count for parallel_for. 0 means hardware_concurrency.
inline int& thread_count() {
	static int n = 0;
	return n;
}

inline int effective_threads() {
	int n = thread_count();
	if (n <= 0) n = (int)std::thread::hardware_concurrency();
	if (n <= 0) n = 1;
	return n;
}

// Runs fn(i) for i in [0, n). Each index writes only its own output slot, so
// results do not depend on the schedule.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
	int workers = effective_threads();
	if (workers <= 1 || n <= 1) {
		for (std::size_t i = 0; i < n; ++i) fn(i);
		return;
	}
	std::atomic<std::size_t> next{0};
	std::vector<std::thread> pool;
	int spawn = (int)std::min<std::size_t>((std::size_t)workers, n);
	pool.reserve((size_t)spawn);
	std::vector<std::exception_ptr> errs((size_t)spawn);
	for (int t = 0; t < spawn; ++t) {
		pool.emplace_back([&, t] {
			try {
				for (;;) {
					std::size_t i = next.fetch_add(1);
					if (i >= n) break;
					fn(i);
				}
			} catch (...) {
				errs[(size_t)t] = std::current_exception();
			}
		});
	}
	for (auto& th : pool) th.join();
	for (auto& e : errs)
		if (e) std::rethrow_exception(e);
}

} // namespace rh
