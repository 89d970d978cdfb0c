#include "splitwalk/targets/sat.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "splitwalk/errors.hpp"

namespace splitwalk {

namespace {


std::string_view trim_left(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    return s;
}

bool parse_int(std::string_view tok, long long& out) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::size_t min_score_for(double bound, Strictness strictness) {
    if (!(bound >= 0.0)) return 0;  // includes -inf
    const double s = strictness == Strictness::Strict ? std::floor(bound) + 1.0 : std::ceil(bound);
    return static_cast<std::size_t>(s);
}

}  // namespace

simd::FlatCnf SatProblem::flatten() const {
    simd::FlatCnf f;
    f.num_vars = n;
    for (const auto& c : clauses) {
        f.lits.insert(f.lits.end(), c.begin(), c.end());
        f.offsets.push_back(static_cast<std::uint32_t>(f.lits.size()));
    }
    return f;
}

SatProblem parse_dimacs(std::string_view text) {
    SatProblem p;
    long long declared_m = -1;
    std::vector<int> current;
    std::size_t line_no = 0;
    std::size_t header_line = 0;
    bool done = false;

    while (!text.empty() && !done) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::string_view body = trim_left(line);
        if (body.empty() || body.front() == 'c') continue;
        if (body.front() == '%') {
            done = true;  // satlib trailer; whatever follows is ignored
            break;
        }
        if (body.front() == 'p') {
            if (declared_m >= 0) throw ParseError("duplicate problem line", line_no);
            const auto toks = split_ws(body);
            long long n = 0;
            if (toks.size() != 4 || toks[0] != "p" || toks[1] != "cnf" || !parse_int(toks[2], n) ||
                !parse_int(toks[3], declared_m) || n < 0 || declared_m < 0 || n > 1'000'000) {
                throw ParseError("malformed problem line, expected 'p cnf <vars> <clauses>'", line_no);
            }
            p.n = static_cast<int>(n);
            header_line = line_no;
            continue;
        }
        if (declared_m < 0) throw ParseError("clause data before the 'p cnf' header", line_no);
        for (std::string_view tok : split_ws(body)) {
            long long lit = 0;
            if (!parse_int(tok, lit)) throw ParseError("invalid literal '" + std::string(tok) + "'", line_no);
            if (lit == 0) {
                // A lone 0 after the declared clauses is a trailer, not an empty clause.
                if (current.empty() && static_cast<long long>(p.clauses.size()) >= declared_m) continue;
                p.clauses.push_back(std::move(current));
                current.clear();
                continue;
            }
            if (std::llabs(lit) > p.n) {
                throw ParseError("literal " + std::to_string(lit) + " out of range for " + std::to_string(p.n) +
                                     " variables",
                                 line_no);
            }
            current.push_back(static_cast<int>(lit));
        }
    }
    if (declared_m < 0) throw ParseError("missing 'p cnf' header", line_no);
    if (!current.empty()) p.clauses.push_back(std::move(current));
    if (static_cast<long long>(p.clauses.size()) != declared_m) {
        throw ParseError("header declares " + std::to_string(declared_m) + " clauses, found " +
                             std::to_string(p.clauses.size()),
                         header_line);
    }
    return p;
}

SatProblem load_dimacs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open DIMACS file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_dimacs(ss.str());
}

std::string to_dimacs(const SatProblem& problem) {
    std::ostringstream out;
    out << "p cnf " << problem.n << ' ' << problem.m() << '\n';
    for (const auto& c : problem.clauses) {
        for (int lit : c) out << lit << ' ';
        out << "0\n";
    }
    return out.str();
}

std::size_t count_satisfied(const SatProblem& problem, const Assignment& assignment) {
    if (assignment.bits.size() != static_cast<std::size_t>(problem.n)) {
        throw UsageError("assignment has " + std::to_string(assignment.bits.size()) + " values for " +
                         std::to_string(problem.n) + " variables");
    }
    std::size_t sat = 0;
    for (const auto& c : problem.clauses) {
        for (int lit : c) {
            const bool value = assignment.bits[static_cast<std::size_t>(std::abs(lit) - 1)] != 0;
            if (value == (lit > 0)) {
                ++sat;
                break;
            }
        }
    }
    return sat;
}

Assignment random_assignment(int n, RngStream& rng) {
    Assignment a;
    a.bits.resize(static_cast<std::size_t>(n));
    std::uint64_t word = 0;
    for (int i = 0; i < n; ++i) {
        if (i % 64 == 0) word = rng.next_u64();
        a.bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((word >> (i % 64)) & 1U);
    }
    return a;
}

SatProblem random_ksat(int n, std::size_t m, int k, RngStream& rng) {
    if (k < 1 || k > n) throw ParameterError("random_ksat: need 1 <= k <= n");
    SatProblem p;
    p.n = n;
    p.clauses.reserve(m);
    std::vector<int> vars(static_cast<std::size_t>(n));
    for (std::size_t c = 0; c < m; ++c) {
        std::iota(vars.begin(), vars.end(), 1);
        std::vector<int> clause;
        // Partial Fisher-Yates picks k distinct variables.
        for (int i = 0; i < k; ++i) {
            const auto j = static_cast<std::size_t>(i) +
                           static_cast<std::size_t>(rng.next_u64() % static_cast<std::uint64_t>(n - i));
            std::swap(vars[static_cast<std::size_t>(i)], vars[j]);
            const int v = vars[static_cast<std::size_t>(i)];
            clause.push_back((rng.next_u64() & 1U) ? v : -v);
        }
        p.clauses.push_back(std::move(clause));
    }
    return p;
}

SatModel::SatModel(SatProblem problem) : problem_(std::move(problem)), occ_(static_cast<std::size_t>(problem_.n)) {
    for (std::size_t c = 0; c < problem_.clauses.size(); ++c) {
        for (int lit : problem_.clauses[c]) {
            auto& list = occ_[static_cast<std::size_t>(std::abs(lit) - 1)];
            if (list.empty() || list.back().clause != c) list.push_back({static_cast<std::uint32_t>(c), 0, 0});
            (lit > 0 ? list.back().positive : list.back().negative) += 1;
        }
    }
}

void SatPopulation::add(Assignment a, std::size_t score) {
    std::lock_guard lock(mu_);
    buckets_.at(score).push_back(std::move(a));
}

bool SatPopulation::pick(std::size_t min_score, RngStream& rng, Assignment& out) const {
    std::lock_guard lock(mu_);
    std::size_t total = 0;
    for (std::size_t s = min_score; s < buckets_.size(); ++s) total += buckets_[s].size();
    if (total == 0) return false;
    auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(total));
    k = std::min(k, total - 1);
    for (std::size_t s = min_score; s < buckets_.size(); ++s) {
        if (k < buckets_[s].size()) {
            out = buckets_[s][k];
            return true;
        }
        k -= buckets_[s].size();
    }
    return false;
}

std::size_t SatPopulation::size() const { return count_at_least(0); }

std::size_t SatPopulation::count_at_least(std::size_t min_score) const {
    std::lock_guard lock(mu_);
    std::size_t total = 0;
    for (std::size_t s = min_score; s < buckets_.size(); ++s) total += buckets_[s].size();
    return total;
}

void SatPopulation::clear() {
    std::lock_guard lock(mu_);
    for (auto& b : buckets_) b.clear();
}

std::pair<Assignment, std::size_t> sat_conditional(const SatModel& model, SatPopulation& population,
                                                   double bound, Strictness strictness, int sweeps,
                                                   RngStream& rng) {
    const SatProblem& problem = model.problem();
    const std::size_t min_score = min_score_for(bound, strictness);
    if (min_score > problem.m()) throw SamplingError("SAT bound above the clause count");

    Assignment u;
    if (min_score == 0) {
        u = random_assignment(problem.n, rng);
    } else if (!population.pick(min_score, rng, u)) {
        throw SamplingError("SAT population starved: no archived assignment satisfies >= " +
                            std::to_string(min_score) + " clauses");
    }

    std::vector<std::uint32_t> true_lits(problem.m(), 0);
    std::size_t score = 0;
    for (std::size_t c = 0; c < problem.m(); ++c) {
        for (int lit : problem.clauses[c]) {
            if ((u.bits[static_cast<std::size_t>(std::abs(lit) - 1)] != 0) == (lit > 0)) ++true_lits[c];
        }
        if (true_lits[c] > 0) ++score;
    }

    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (int v = 0; v < problem.n; ++v) {
            const bool value = u.bits[static_cast<std::size_t>(v)] != 0;
            long long flipped = static_cast<long long>(score);
            for (const auto& o : model.occurrences(v)) {
                const std::uint32_t lose = value ? o.positive : o.negative;
                const std::uint32_t gain = value ? o.negative : o.positive;
                const std::uint32_t after = true_lits[o.clause] - lose + gain;
                flipped += (after > 0) - (true_lits[o.clause] > 0);
            }
            if (flipped < static_cast<long long>(min_score)) continue;
            if (rng.uniform() >= 0.5) continue;
            for (const auto& o : model.occurrences(v)) {
                true_lits[o.clause] = true_lits[o.clause] - (value ? o.positive : o.negative) +
                                      (value ? o.negative : o.positive);
            }
            u.bits[static_cast<std::size_t>(v)] = value ? 0 : 1;
            score = static_cast<std::size_t>(flipped);
        }
    }
    population.add(u, score);
    return {std::move(u), score};
}

SatSampler::SatSampler(SatProblem problem, int sweeps)
    : model_(std::move(problem)), population_(model_.m()), sweeps_(sweeps) {
    if (sweeps < 0) throw ParameterError("Gibbs sweeps must be non-negative");
}

double SatSampler::sample_initial(RngStream& rng) {
    Assignment a = random_assignment(model_.n(), rng);
    const std::size_t score = count_satisfied(model_.problem(), a);
    population_.add(std::move(a), score);
    return static_cast<double>(score);
}

double SatSampler::sample_above(double bound, Strictness strictness, RngStream& rng) {
    return static_cast<double>(sat_conditional(model_, population_, bound, strictness, sweeps_, rng).second);
}

}  // namespace splitwalk
