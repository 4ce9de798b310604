#pragma once

#include "vlad/error.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <thread>

namespace vlad::genclients {

// Capped exponential backoff: delay_n = min(initial * 2^n, max_delay).
struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds initial_delay{500};
    std::chrono::milliseconds max_delay{8000};
    std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
        std::this_thread::sleep_for(d);
    };

    static RetryPolicy immediate(int retries) {
        RetryPolicy p;
        p.max_retries = retries;
        p.sleep = [](std::chrono::milliseconds) {};
        return p;
    }
};

// Runs `call`, retrying on retryable Error codes; the last failure is rethrown.
template <typename F>
auto with_retries(const RetryPolicy& policy, F&& call) -> decltype(call()) {
    auto delay = policy.initial_delay;
    for (int attempt = 0;; ++attempt) {
        try {
            return call();
        } catch (const Error& e) {
            if (!e.retryable() || attempt >= policy.max_retries) {
                throw;
            }
        }
        policy.sleep(delay);
        delay = std::min(delay * 2, policy.max_delay);
    }
}

}  // namespace vlad::genclients
