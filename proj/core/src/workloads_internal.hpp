#pragma once

#include "cachesim/workloads.hpp"

namespace cachesim::detail {

CpuWorkload cpu_matmul(std::uint64_t n, bool b_transposed, const GenOptions& opt);
CpuWorkload cpu_matmul_blocked(std::uint64_t n, std::uint64_t b, Variant variant, const GenOptions& opt);
CpuWorkload cpu_array_merge(std::uint64_t n, bool merged, const GenOptions& opt);

GpuWorkload gpu_matmul(std::uint64_t n, bool b_transposed, const GenOptions& opt);
GpuWorkload gpu_matmul_shared(std::uint64_t n, std::uint64_t b, const GenOptions& opt);
GpuWorkload gpu_array_merge(std::uint64_t n, bool merged, const GenOptions& opt);

}  // namespace cachesim::detail
