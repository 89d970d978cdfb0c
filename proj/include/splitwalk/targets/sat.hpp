#pragma once

/// CNF formulas as rare-event targets: the score of a uniform random truth
/// assignment is the number of clauses it satisfies, so P(X > m - 1) is the
/// fraction of satisfying assignments.

#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "splitwalk/rng.hpp"
#include "splitwalk/simd/kernels.hpp"
#include "splitwalk/walk.hpp"

namespace splitwalk {

struct SatProblem {
    int n = 0;  // variables
    std::vector<std::vector<int>> clauses;

    std::size_t m() const noexcept { return clauses.size(); }
    simd::FlatCnf flatten() const;
};

struct Assignment {
    std::vector<std::uint8_t> bits;  // bits[i] is the value of variable i + 1

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// DIMACS CNF. Comment lines start with 'c'; clauses end with 0 and may span
/// lines; a satlib '%' trailer ends the clause section.
SatProblem parse_dimacs(std::string_view text);
SatProblem load_dimacs(const std::string& path);
std::string to_dimacs(const SatProblem& problem);

std::size_t count_satisfied(const SatProblem& problem, const Assignment& assignment);

Assignment random_assignment(int n, RngStream& rng);

/// Uniform random k-CNF: each clause has k distinct variables with
/// independent signs.
SatProblem random_ksat(int n, std::size_t m, int k, RngStream& rng);

/// Problem plus variable occurrence lists for incremental score updates.
class SatModel {
public:
    explicit SatModel(SatProblem problem);

    const SatProblem& problem() const noexcept { return problem_; }
    int n() const noexcept { return problem_.n; }
    std::size_t m() const noexcept { return problem_.m(); }

    /// Literals of one variable inside one clause, by sign.
    struct Occurrence {
        std::uint32_t clause;
        std::uint32_t positive;
        std::uint32_t negative;
    };
    const std::vector<Occurrence>& occurrences(int var) const { return occ_[static_cast<std::size_t>(var)]; }

private:
    SatProblem problem_;
    std::vector<std::vector<Occurrence>> occ_;
};

/// Append-only archive of assignments bucketed by score. Safe for
/// concurrent pick/add.
class SatPopulation {
public:
    explicit SatPopulation(std::size_t m) : buckets_(m + 1) {}

    void add(Assignment a, std::size_t score);
    /// Uniform member with score >= min_score; false when none exists.
    bool pick(std::size_t min_score, RngStream& rng, Assignment& out) const;
    std::size_t size() const;
    std::size_t count_at_least(std::size_t min_score) const;
    void clear();

private:
    mutable std::mutex mu_;
    std::vector<std::vector<Assignment>> buckets_;
};

/// Systematic Gibbs sampler targeting the uniform law on
/// {u : score(u) >= bound} (NonStrict) or {u : score(u) > bound} (Strict).
///
/// Starts from a uniform archive member inside the domain (or a uniform
/// random assignment when the domain is everything), then runs `sweeps`
/// passes over variables 1..n: each variable is redrawn uniformly among the
/// values that keep the assignment in the domain. The result is added to
/// the archive. Throws SamplingError when no archive member is in the domain.
std::pair<Assignment, std::size_t> sat_conditional(const SatModel& model, SatPopulation& population,
                                                   double bound, Strictness strictness, int sweeps,
                                                   RngStream& rng);

/// Walk adapter. Shares one population across the walks of a batch, so
/// batches run serially; the archive is cleared at each batch start.
class SatSampler final : public ConditionalSampler {
public:
    SatSampler(SatProblem problem, int sweeps = 5);

    double sample_initial(RngStream& rng) override;
    double sample_above(double bound, Strictness strictness, RngStream& rng) override;
    bool shares_state() const noexcept override { return true; }
    void begin_batch() override { population_.clear(); }

    const SatModel& model() const noexcept { return model_; }
    const SatPopulation& population() const noexcept { return population_; }

private:
    SatModel model_;
    SatPopulation population_;
    int sweeps_;
};

}  // namespace splitwalk
