#include "rwb/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace rwb {

int worker_count()
{
    if (const char* env = std::getenv("RWB_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body, int workers)
{
    if (count == 0) return;
    const std::size_t nworkers = std::min<std::size_t>(std::max(workers, 1), count);
    if (nworkers == 1) {
        body(0, count);
        return;
    }
    // Interleaved small slices balance uneven per-index cost.
    const std::size_t slice = std::max<std::size_t>(1, count / (nworkers * 16));
    const std::size_t nslices = (count + slice - 1) / slice;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> threads;
    threads.reserve(nworkers);
    for (std::size_t w = 0; w < nworkers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t s = w; s < nslices; s += nworkers) {
                    const std::size_t begin = s * slice;
                    body(begin, std::min(count, begin + slice));
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    threads.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace rwb
