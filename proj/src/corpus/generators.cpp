#include <objql/corpus.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace objql::corpus {

namespace {

// Distributions in <random> vary across standard libraries; these do not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    auto unit() -> double { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    auto uniform(double lo, double hi) -> double { return lo + (hi - lo) * unit(); }
    auto below(std::uint64_t n) -> std::uint64_t { return gen_() % n; }
    auto chance(double p) -> bool { return unit() < p; }
    auto normal() -> double {
        double u1 = 1.0 - unit();
        double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
    template <class T>
    void shuffle(std::vector<T>& xs) {
        for (std::size_t i = xs.size(); i > 1; --i) {
            std::swap(xs[i - 1], xs[below(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

auto round2(double v) -> double { return std::round(v * 100.0) / 100.0; }
auto round3(double v) -> double { return std::round(v * 1000.0) / 1000.0; }

constexpr std::array kObjectLabels = {"car", "person", "truck", "bus", "rider", "bicycle"};
constexpr std::array kAnimals = {"deer",    "elk",    "coyote",  "bobcat",   "raccoon",
                                 "fox",     "opossum", "rabbit", "squirrel", "turkey"};

constexpr int kLanes = 8;
constexpr double kLaneHeight = kImageHeight / kLanes;
constexpr double kBoxHeight = 96.0;
constexpr double kTeleport = 60.0;
constexpr int kCooldown = 4;

struct Track {
    int lane = 0;
    double width = 0;
    double x = 0;
    double vx = 0;
    std::string label;
    int last_fault = -kCooldown;
    std::vector<std::optional<Box>> emitted;
};

auto jittered(const Track& t, Rng& rng) -> Box {
    double y = t.lane * kLaneHeight + (kLaneHeight - kBoxHeight) / 2;
    return {round2(t.x + rng.uniform(-0.5, 0.5)), round2(y + rng.uniform(-0.5, 0.5)),
            round2(t.x + t.width + rng.uniform(-0.5, 0.5)),
            round2(y + kBoxHeight + rng.uniform(-0.5, 0.5))};
}

void step(Track& t) {
    t.x += t.vx;
    double max_x = kImageWidth - t.width;
    if (t.x < 0) {
        t.x = -t.x;
        t.vx = -t.vx;
    } else if (t.x > max_x) {
        t.x = 2 * max_x - t.x;
        t.vx = -t.vx;
    }
}

}  // namespace

auto gen_detections(std::uint64_t seed, int n_seqs, int frames_per_seq, double drop_rate,
                    double teleport_rate) -> Generated {
    Rng rng(seed);
    Generated out;
    std::vector<Value> rows;
    for (int s = 0; s < n_seqs; ++s) {
        std::vector<int> lanes(kLanes);
        for (int i = 0; i < kLanes; ++i) {
            lanes[i] = i;
        }
        rng.shuffle(lanes);
        int n_objects = 3 + static_cast<int>(rng.below(4));
        std::vector<Track> tracks;
        for (int o = 0; o < n_objects; ++o) {
            Track t;
            t.lane = lanes[o];
            t.width = std::round(rng.uniform(200, 260));
            t.x = rng.uniform(100, kImageWidth - t.width - 100);
            t.vx = rng.uniform(-6, 6);
            t.label = kObjectLabels[rng.below(kObjectLabels.size())];
            tracks.push_back(std::move(t));
        }

        for (int f = 0; f < frames_per_seq; ++f) {
            DetectionRecord rec;
            rec.seq_id = s;
            rec.frame_id = f;
            for (auto& t : tracks) {
                bool fault_ok = f - t.last_fault >= kCooldown;
                bool teleport = false;
                if (f > 0) {
                    teleport = fault_ok && f + 1 < frames_per_seq && rng.chance(teleport_rate);
                    step(t);
                    if (teleport) {
                        t.x += (t.x + t.width / 2 < kImageWidth / 2) ? kTeleport : -kTeleport;
                        t.last_fault = f;
                        out.truth.push_back(
                            {"teleport", Value::list({Value(s), Value(f - 1)})});
                    }
                }
                Box b = jittered(t, rng);
                bool drop = false;
                if (!teleport && fault_ok && f >= 2 && t.emitted[f - 2] && t.emitted[f - 1] &&
                    is_center(*t.emitted[f - 2]) && is_center(*t.emitted[f - 1])) {
                    drop = rng.chance(drop_rate);
                }
                if (drop) {
                    t.last_fault = f;
                    t.emitted.emplace_back();
                    out.truth.push_back({"disappearance", Value::list({Value(s), Value(f - 2),
                                                                       to_value(*t.emitted[f - 2])})});
                    continue;
                }
                t.emitted.emplace_back(b);
                rec.boxes.push_back(b);
                rec.labels.push_back(t.label);
            }
            rows.push_back(to_value(rec));
        }
    }
    out.table = Table(std::move(rows));
    return out;
}

namespace {

struct Feature {
    const char* name;
    double base;
    double amplitude;
    double period;
};

constexpr std::array kFeatures = {
    Feature{"HR", 75, 8, 24},      Feature{"Temp", 37.0, 0.4, 24}, Feature{"RespRate", 16, 2, 12},
    Feature{"SysBP", 120, 10, 24}, Feature{"SpO2", 97, 1, 16},     Feature{"Glucose", 110, 15, 24},
};

struct Cell {
    std::optional<double> value;
    bool imputed = false;
};

auto series_bounds(const std::vector<Cell>& cells, bool use_all)
    -> std::optional<std::pair<double, double>> {
    std::vector<double> basis;
    for (const auto& c : cells) {
        if (c.value && (use_all || !c.imputed)) {
            basis.push_back(*c.value);
        }
    }
    if (basis.empty()) {
        return std::nullopt;
    }
    return iqr_bounds(basis);
}

// Indices of imputed cells outside the bounds in either basis mode.
auto flagged(const std::vector<Cell>& cells) -> std::vector<std::size_t> {
    std::vector<std::size_t> out;
    auto obs = series_bounds(cells, false);
    auto all = series_bounds(cells, true);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        if (c.imputed && c.value &&
            ((obs && outside_bounds(*c.value, *obs)) || (all && outside_bounds(*c.value, *all)))) {
            out.push_back(i);
        }
    }
    return out;
}

auto flagged_in_both(const std::vector<Cell>& cells, std::size_t i) -> bool {
    auto obs = series_bounds(cells, false);
    auto all = series_bounds(cells, true);
    return obs && all && outside_bounds(*cells[i].value, *obs) &&
           outside_bounds(*cells[i].value, *all);
}

}  // namespace

auto gen_timeseries(std::uint64_t seed, int n_samples, int n_features, int t_len,
                    double outlier_rate) -> Generated {
    constexpr double kMissingRate = 0.08;
    constexpr double kImputeRate = 0.15;
    Rng rng(seed);
    Generated out;
    std::vector<Value> rows;
    n_features = std::clamp(n_features, 1, static_cast<int>(kFeatures.size()));

    for (int s = 0; s < n_samples; ++s) {
        for (int fi = 0; fi < n_features; ++fi) {
            const Feature& feat = kFeatures[fi];
            double phase = rng.uniform(0, 2 * M_PI);
            double base = feat.base + rng.uniform(-0.05, 0.05) * feat.base;
            std::vector<double> truth(t_len);
            for (int t = 0; t < t_len; ++t) {
                truth[t] = base + feat.amplitude * std::sin(2 * M_PI * t / feat.period + phase) +
                           0.03 * feat.amplitude * rng.normal();
            }

            std::vector<Cell> cells(t_len);
            for (int t = 0; t < t_len; ++t) {
                double u = rng.unit();
                if (u < kMissingRate) {
                    continue;
                }
                cells[t].value = round2(truth[t]);
                cells[t].imputed = u < kMissingRate + kImputeRate;
            }
            // Imputed entries interpolate between the nearest observed neighbours.
            auto observed = [&](int t) { return cells[t].value && !cells[t].imputed; };
            for (int t = 0; t < t_len; ++t) {
                if (!cells[t].imputed) {
                    continue;
                }
                int lo = t - 1;
                while (lo >= 0 && !observed(lo)) {
                    --lo;
                }
                int hi = t + 1;
                while (hi < t_len && !observed(hi)) {
                    ++hi;
                }
                if (lo < 0 && hi >= t_len) {
                    cells[t].imputed = false;
                    cells[t].value.reset();
                } else if (lo < 0) {
                    cells[t].value = cells[hi].value;
                } else if (hi >= t_len) {
                    cells[t].value = cells[lo].value;
                } else {
                    double w = static_cast<double>(t - lo) / (hi - lo);
                    cells[t].value = round2(*cells[lo].value + w * (*cells[hi].value - *cells[lo].value));
                }
            }
            // Clean data must not trip the check.
            for (auto i : flagged(cells)) {
                cells[i].value.reset();
                cells[i].imputed = false;
            }

            std::vector<std::size_t> candidates;
            for (int t = 0; t < t_len; ++t) {
                if (cells[t].imputed && cells[t].value) {
                    candidates.push_back(static_cast<std::size_t>(t));
                }
            }
            if (!candidates.empty() && rng.chance(outlier_rate)) {
                std::size_t idx = candidates[rng.below(candidates.size())];
                auto obs = series_bounds(cells, false);
                if (obs) {
                    double spread = (obs->second - obs->first) / 4.0;  // bounds span 4 IQR
                    double margin = 0.1 + 0.5 * spread;
                    double lq = obs->first + 1.5 * spread;
                    double uq = obs->second - 1.5 * spread;
                    bool up = rng.chance(0.5);
                    double v = up ? std::ceil((uq + 3 * spread + margin) * 100) / 100
                                  : std::floor((lq - 3 * spread - margin) * 100) / 100;
                    std::vector<Cell> trial = cells;
                    trial[idx].value = v;
                    auto hits = flagged(trial);
                    if (hits.size() == 1 && hits[0] == idx && flagged_in_both(trial, idx)) {
                        cells = std::move(trial);
                        out.truth.push_back({"outlier", Value::list({Value(s), Value(feat.name),
                                                                     Value(static_cast<std::int64_t>(idx))})});
                    }
                }
            }

            for (int t = 0; t < t_len; ++t) {
                rows.push_back(Value::map({
                    {"sample_id", s},
                    {"feature", feat.name},
                    {"t", t},
                    {"value", cells[t].value ? Value(*cells[t].value) : Value()},
                    {"imputed", cells[t].imputed},
                }));
            }
        }
    }
    out.table = Table(std::move(rows));
    return out;
}

auto gen_sequence_labels(std::uint64_t seed, int n_seqs, int frames_per_seq, double mixed_rate)
    -> Generated {
    Rng rng(seed);
    Generated out;
    std::vector<Value> rows;
    for (int s = 0; s < n_seqs; ++s) {
        int len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(frames_per_seq, 1))));
        std::size_t primary = rng.below(kAnimals.size());
        std::vector<std::string> labels(len, kAnimals[primary]);
        if (len >= 2 && rng.chance(mixed_rate)) {
            int extras = 1 + static_cast<int>(rng.below(2));
            extras = std::min(extras, len - 1);
            std::vector<int> frames(len);
            for (int i = 0; i < len; ++i) {
                frames[i] = i;
            }
            rng.shuffle(frames);
            for (int e = 0; e < extras; ++e) {
                std::size_t other = (primary + 1 + rng.below(kAnimals.size() - 1)) % kAnimals.size();
                labels[frames[e]] = kAnimals[other];
            }
            out.truth.push_back({"multilabel", Value(s)});
        }
        for (int f = 0; f < len; ++f) {
            rows.push_back(Value::map({{"seq_id", s}, {"frame_id", f}, {"label", labels[f]}}));
        }
    }
    rng.shuffle(rows);
    out.table = Table(std::move(rows));
    return out;
}

auto gen_frame_diffs(std::uint64_t seed, int n_seqs, int frames_per_seq, double mislabel_rate)
    -> Generated {
    Rng rng(seed);
    Generated out;
    std::vector<Value> rows;
    for (int s = 0; s < n_seqs; ++s) {
        std::size_t animal = rng.below(kAnimals.size());
        for (int f = 1; f < frames_per_seq; ++f) {
            bool empty = rng.chance(0.3);
            double diff;
            if (rng.chance(0.05)) {
                diff = 0.0;  // duplicated frame
            } else if (empty) {
                diff = rng.chance(0.05) ? kEmptyFrameThreshold : round3(rng.uniform(0.005, 0.13));
            } else {
                diff = round3(rng.uniform(0.2, 0.9));
            }
            std::string label = empty ? "empty" : kAnimals[animal];
            if (empty && diff > 0 && rng.chance(mislabel_rate)) {
                label = kAnimals[animal];
                out.truth.push_back({"mislabel", Value::list({Value(s), Value(f)})});
            }
            rows.push_back(Value::map(
                {{"seq_id", s}, {"frame_id", f}, {"label", label}, {"diff", diff}}));
        }
    }
    out.table = Table(std::move(rows));
    return out;
}

}  // namespace objql::corpus
