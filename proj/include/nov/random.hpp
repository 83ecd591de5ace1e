#pragma once

// Seeded generators for filtered complexes whose barcodes are known by
// construction: a diagonal pairing conjugated by a filtered change of basis.

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "nov/filtered.hpp"

namespace nov {

std::uint64_t splitmix64(std::uint64_t x);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}
    // Independent stream for sub-task `index`.
    Rng derive(std::uint64_t index) const { return Rng(splitmix64(seed_ ^ splitmix64(index + 1))); }

    std::uint64_t next() { return engine_(); }
    long uniform(long lo, long hi);  // inclusive
    bool coin(long num, long den);   // true with probability num/den
    // Uniform in [lo, hi] on the grid 1/den for a random den in 1..max_den.
    Rat rational(long lo, long hi, long max_den);
    template <class T>
    void shuffle(std::vector<T>& v) {
        std::shuffle(v.begin(), v.end(), engine_);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

struct RandomComplexOptions {
    std::size_t generators = 6;
    FiltrationMode mode = FiltrationMode::Strict;
    // Allow T-adic entries: Novikov conjugation and generator rescaling.
    bool novikov_entries = false;
    long action_range = 3;
    long max_den = 4;
};

struct PlantedComplex {
    FilteredComplex complex;
    Barcode expected;
    // Pairs (target, source) of the planted diagonal differential.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::size_t> unpaired;
    // Column j is the planted generator j written in the final basis; it
    // has level planted_actions[j].
    Mat frame;
    std::vector<Rat> planted_actions;
};

PlantedComplex random_complex(Rng& rng, const RandomComplexOptions& opts, const Field& field);

// Moves every action by at most delta, retrying until the result is a valid
// complex in the same mode; falls back to the unperturbed complex.
FilteredComplex perturb_actions(Rng& rng, const FilteredComplex& C, const Rat& delta);

}  // namespace nov
