#ifndef MIXEDSYS_PARALLEL_HPP
#define MIXEDSYS_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <mutex>

namespace mixedsys {

/// Worker count for the OpenMP kernels. 0 restores the runtime default.
void set_worker_count(int n);
int worker_count();

/// Collects the first exception thrown inside an OpenMP region so it can be
/// rethrown on the calling thread once the region has joined.
class ExceptionSlot {
public:
    template <class F>
    void run(F&& f) noexcept {
        try {
            f();
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!first_) first_ = std::current_exception();
        }
    }
    void rethrow() const {
        if (first_) std::rethrow_exception(first_);
    }

private:
    std::mutex mutex_;
    std::exception_ptr first_;
};

} // namespace mixedsys

#endif
