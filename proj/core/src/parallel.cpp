#include "snnkit/parallel.hpp"

namespace snnkit {

int& thread_count() {
    static int n = []() {
        unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }();
    return n;
}

namespace detail {

namespace {
thread_local bool inside_pool_worker = false;
}

ThreadPool::ThreadPool(int workers) {
    for (int i = 0; i < workers; ++i) threads_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool() {
    {
        std::lock_guard<std::mutex> lk(mu_);
        stop_ = true;
    }
    cv_work_.notify_all();
    for (auto& t : threads_) t.join();
}

void ThreadPool::worker_loop() {
    for (;;) {
        std::pair<int64_t, int64_t> range;
        {
            std::unique_lock<std::mutex> lk(mu_);
            cv_work_.wait(lk, [this] { return stop_ || (has_task_ && task_.next < task_.ranges.size()); });
            if (stop_) return;
            range = task_.ranges[task_.next++];
        }
        inside_pool_worker = true;
        (*task_.fn)(range.first, range.second);
        inside_pool_worker = false;
        {
            std::lock_guard<std::mutex> lk(mu_);
            if (++task_.done == task_.ranges.size()) {
                has_task_ = false;
                cv_done_.notify_all();
            }
        }
    }
}

void ThreadPool::run_ranges(int64_t n, int parts, const std::function<void(int64_t, int64_t)>& fn) {
    std::vector<std::pair<int64_t, int64_t>> ranges;
    const int64_t chunk = (n + parts - 1) / parts;
    for (int64_t lo = 0; lo < n; lo += chunk) ranges.push_back({lo, std::min(lo + chunk, n)});
    {
        std::lock_guard<std::mutex> lk(mu_);
        task_.fn = &fn;
        task_.ranges = std::move(ranges);
        task_.next = 0;
        task_.done = 0;
        has_task_ = true;
    }
    cv_work_.notify_all();
    {
        std::unique_lock<std::mutex> lk(mu_);
        cv_done_.wait(lk, [this] { return !has_task_; });
    }
}

}  // namespace detail

void parallel_for(int64_t n, const std::function<void(int64_t)>& fn) {
    if (n <= 0) return;
    const int workers = thread_count();
    if (workers <= 1 || n == 1 || detail::inside_pool_worker) {
        for (int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    static detail::ThreadPool pool(thread_count());
    auto body = [&fn](int64_t lo, int64_t hi) {
        for (int64_t i = lo; i < hi; ++i) fn(i);
    };
    pool.run_ranges(n, workers, body);
}

}  // namespace snnkit
