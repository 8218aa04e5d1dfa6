#pragma once

#include <algorithm>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace snnkit {

/// Global worker count for parallel_for. Kernels that use parallel_for only
/// parallelize loops whose iterations write disjoint outputs and whose
/// per-iteration accumulation order is fixed, so results are bit-identical
/// for any thread count.
int& thread_count();

/// Static-partition parallel loop over [0, n). fn(i) must not touch state
/// written by other iterations.
void parallel_for(int64_t n, const std::function<void(int64_t)>& fn);

namespace detail {

class ThreadPool {
public:
    explicit ThreadPool(int workers);
    ~ThreadPool();

    // Runs fn(lo, hi) on `parts` half-open ranges covering [0, n).
    void run_ranges(int64_t n, int parts, const std::function<void(int64_t, int64_t)>& fn);

private:
    struct Task {
        const std::function<void(int64_t, int64_t)>* fn = nullptr;
        std::vector<std::pair<int64_t, int64_t>> ranges;
        size_t next = 0;
        size_t done = 0;
    };

    void worker_loop();

    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable cv_work_;
    std::condition_variable cv_done_;
    Task task_;
    bool has_task_ = false;
    bool stop_ = false;
};

}  // namespace detail

}  // namespace snnkit
