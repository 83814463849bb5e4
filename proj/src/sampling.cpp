#include "fair_amdp/sampling.hpp"

namespace fairmdp {

namespace {

constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

uint64_t fnv1a(std::string_view text) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace

uint64_t RngStream::next_u64() {
    state_ += kGamma;
    return mix64(state_);
}

double RngStream::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

RngStream RngStream::fork(std::string_view label) const {
    return RngStream(mix64(seed_ ^ fnv1a(label)));
}

RngStream RngStream::fork(uint64_t index) const {
    return RngStream(mix64(seed_ ^ (kGamma * (index + 1))));
}

int sample_categorical(const Vec& weights, RngStream& rng) {
    const int k = static_cast<int>(weights.size());
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        if (weights[i] < 0.0)
            throw std::invalid_argument("categorical weights must be non-negative");
        total += weights[i];
    }
    if (total <= 0.0)
        throw std::invalid_argument("categorical weights sum to zero");

    const double point = rng.next_uniform() * total;
    double cumulative = 0.0;
    int last_positive = -1;
    for (int i = 0; i < k; ++i) {
        if (weights[i] <= 0.0) continue;
        cumulative += weights[i];
        last_positive = i;
        if (point < cumulative) return i;
    }
    return last_positive; // point == total up to rounding
}

SampleOutcome sample_transition(const MdpModel& model, int s, int a, RngStream& rng) {
    if (s < 0 || s >= model.n_states || a < 0 || a >= model.n_actions)
        throw std::out_of_range("state or action index out of range");
    const int idx = model.pair_index(s, a);
    const Vec row = model.transitions.row(idx);
    return SampleOutcome{sample_categorical(row, rng), model.rewards[idx]};
}

int sample_pair_uniform(int pair_count, RngStream& rng) {
    const int drawn = static_cast<int>(rng.next_uniform() * pair_count);
    return drawn >= pair_count ? pair_count - 1 : drawn;
}

int sample_pair_from(const Vec& x, RngStream& rng) {
    return sample_categorical(x, rng);
}

} // namespace fairmdp
