#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace nlos {

// Error taxonomy. Validation-type errors (bad arguments, malformed
// configs, shape mismatches) map to CLI exit code 2; everything else
// is a runtime failure (exit code 1).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParamError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct InputError : Error { using Error::Error; };
struct IngestError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct TrainError : Error { using Error::Error; };

// Process-wide worker count. Work is always partitioned in a fixed
// order with per-item output slots, so results do not depend on the
// number of workers.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [0, n). Chunked static partition across the
// configured worker count; runs inline when single-threaded.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

} // namespace nlos
