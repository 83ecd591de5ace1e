#include "nov/random.hpp"

#include <algorithm>
#include <numeric>

namespace nov {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

long Rng::uniform(long lo, long hi) {
    std::uniform_int_distribution<long> dist(lo, hi);
    return dist(engine_);
}

bool Rng::coin(long num, long den) { return uniform(0, den - 1) < num; }

Rat Rng::rational(long lo, long hi, long max_den) {
    const long den = uniform(1, max_den);
    return make_rat(uniform(lo * den, hi * den), den);
}

namespace {

Series constant(const Field& f, long c) { return Series::constant(Scalar::from_int(f, c)); }

long nonzero(Rng& rng) {
    long c = rng.uniform(-2, 2);
    return c == 0 ? 1 : c;
}

}  // namespace

PlantedComplex random_complex(Rng& rng, const RandomComplexOptions& opts, const Field& field) {
    const std::size_t n = opts.generators;
    PlantedComplex out;
    std::vector<int> degree(n);
    std::vector<Rat> action(n);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    const std::size_t k = static_cast<std::size_t>(rng.uniform(0, static_cast<long>(n / 2)));
    for (std::size_t t = 0; t < k; ++t) {
        const std::size_t q = idx[2 * t], p = idx[2 * t + 1];
        Rat a = rng.rational(-opts.action_range, opts.action_range, opts.max_den);
        Rat b = rng.rational(-opts.action_range, opts.action_range, opts.max_den);
        while (opts.mode == FiltrationMode::Strict && a == b) b = rng.rational(-opts.action_range, opts.action_range, opts.max_den);
        if (a > b) std::swap(a, b);
        degree[p] = static_cast<int>(rng.uniform(0, 1));
        degree[q] = 1 - degree[p];
        action[q] = a;
        action[p] = b;
        out.pairs.emplace_back(q, p);
        out.expected.finite.push_back(b - a);
    }
    for (std::size_t t = 2 * k; t < n; ++t) {
        const std::size_t u = idx[t];
        degree[u] = static_cast<int>(rng.uniform(0, 1));
        action[u] = rng.rational(-opts.action_range, opts.action_range, opts.max_den);
        out.unpaired.push_back(u);
    }
    std::sort(out.expected.finite.begin(), out.expected.finite.end(), [](const Rat& x, const Rat& y) { return x > y; });
    out.expected.infinite = n - 2 * k;

    Mat d0 = mat::zeros(field, n, n);
    for (const auto& [q, p] : out.pairs) d0[q][p] = Series::one(field);

    // Level-preserving unipotent change of basis U = I + N.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (opts.novikov_entries) rng.shuffle(order);
    else
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return action[a] != action[b] ? action[a] < action[b] : a < b;
        });
    std::vector<std::size_t> rank(n);
    for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;
    Mat N = mat::zeros(field, n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (rank[i] >= rank[j] || degree[i] != degree[j] || !rng.coin(1, 2)) continue;
            if (opts.novikov_entries) {
                const Rat g = action[i] - action[j] + make_rat(rng.uniform(0, 4), 4);
                N[i][j] = Series::monomial(Scalar::from_int(field, nonzero(rng)), g);
            } else {
                N[i][j] = constant(field, nonzero(rng));
            }
        }
    Mat U = mat::add(mat::identity(field, n), N);
    Mat Uinv = mat::identity(field, n), power = mat::identity(field, n);
    Mat minusN = mat::scale(N, constant(field, -1));
    for (std::size_t t = 1; t < n; ++t) {
        power = mat::mul(power, minusN);
        Uinv = mat::add(Uinv, power);
    }
    Mat d = mat::mul(mat::mul(U, d0), Uinv);

    std::vector<Rat> shift(n, Rat(0));
    if (opts.novikov_entries)
        for (auto& a : shift) a = rng.rational(-2, 2, opts.max_den);

    FilteredComplex& C = out.complex;
    C.field = field;
    C.mode = opts.mode;
    for (std::size_t i = 0; i < n; ++i) C.gens.push_back({"x" + std::to_string(i), degree[i], action[i] - shift[i]});
    C.d = d;
    out.frame = U;
    for (std::size_t q = 0; q < n; ++q)
        for (std::size_t p = 0; p < n; ++p) {
            if (!C.d[q][p].is_exact_zero()) C.d[q][p] = C.d[q][p].shifted(shift[p] - shift[q]);
            if (!out.frame[q][p].is_exact_zero()) out.frame[q][p] = out.frame[q][p].shifted(-shift[q]);
        }
    out.planted_actions = action;
    return out;
}

FilteredComplex perturb_actions(Rng& rng, const FilteredComplex& C, const Rat& delta) {
    for (int attempt = 0; attempt < 32; ++attempt) {
        FilteredComplex D = C;
        for (auto& g : D.gens) {
            const long den = rng.uniform(1, 4);
            const Rat step = delta / den;
            g.action += step * rng.uniform(-den, den);
        }
        if (validate(D).ok) return D;
    }
    return C;
}

}  // namespace nov
