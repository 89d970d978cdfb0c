#pragma once

// Data-parallel inner loops.
//
// Each kernel has a scalar reference implementation and an AVX2 variant with
// the same contract. Results are bitwise identical between variants: the
// floating-point kernels use the same operation order, and the project builds
// with -ffp-contract=off so neither side fuses multiply-adds.
//
// The active variant is chosen once at runtime from CPUID. Setting
// SPLITWALK_SIMD=scalar in the environment, or calling set_isa(), forces the
// reference path.

#include <cstdint>
#include <span>
#include <vector>

namespace splitwalk::simd {

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa) noexcept;

/// True when the CPU and the build both support `isa`.
bool supported(Isa isa) noexcept;
Isa active_isa() noexcept;
/// Overrides the runtime choice; falls back to Scalar if unsupported.
void set_isa(Isa isa) noexcept;

// ---------------------------------------------------------------------------
// Double-well diffusion, Euler-Maruyama
// ---------------------------------------------------------------------------

struct DiffusionParams {
    double a = 0.6;
    double b = 0.3;
    double beta = 10.0;
    double dt = 1.0;
    double u1 = -0.9;
    double u2 = 0.0;
    std::uint64_t max_steps = 1'000'000;
};

/// Scores of trajectories first, first+1, ..., first+out.size()-1.
/// Trajectory j draws its noise from RngStream(key, j), so a score depends
/// only on (key, j), never on how trajectories are packed into lanes.
/// Score = max over Euler states (t = 0 included) of 0.5 (1 + u1), stopping
/// once that reaches <= 0 or >= 1. Throws SamplingError past max_steps.
using DiffusionScoresFn = void (*)(const DiffusionParams&, std::uint64_t key, std::uint64_t first,
                                   std::span<double> out);

void diffusion_scores_scalar(const DiffusionParams& p, std::uint64_t key, std::uint64_t first,
                             std::span<double> out);
void diffusion_scores_avx2(const DiffusionParams& p, std::uint64_t key, std::uint64_t first,
                           std::span<double> out);

void diffusion_scores(const DiffusionParams& p, std::uint64_t key, std::uint64_t first,
                      std::span<double> out);

// ---------------------------------------------------------------------------
// CNF model counting by bit-sliced enumeration
// ---------------------------------------------------------------------------

/// Clauses flattened: literals of clause c are lits[offsets[c] .. offsets[c+1]).
struct FlatCnf {
    int num_vars = 0;
    std::vector<std::int32_t> lits;
    std::vector<std::uint32_t> offsets{0};
};

/// Number of assignments with index in [begin, end) satisfying every clause.
/// Bit i of the index is the value of variable i+1. begin must be a multiple
/// of 256 unless it equals end.
using CountModelsFn = std::uint64_t (*)(const FlatCnf&, std::uint64_t begin, std::uint64_t end);

std::uint64_t count_models_scalar(const FlatCnf& cnf, std::uint64_t begin, std::uint64_t end);
std::uint64_t count_models_avx2(const FlatCnf& cnf, std::uint64_t begin, std::uint64_t end);

std::uint64_t count_models(const FlatCnf& cnf, std::uint64_t begin, std::uint64_t end);

}  // namespace splitwalk::simd
