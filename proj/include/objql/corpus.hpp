#pragma once

#include <objql/engine.hpp>
#include <objql/errors.hpp>
#include <objql/qlang/compiler.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace objql::corpus {

// Synthetic frames follow the Cityscapes geometry.
inline constexpr double kImageWidth = 2048.0;
inline constexpr double kImageHeight = 1024.0;
inline constexpr std::string_view kNoMatch = "No Match";
inline constexpr double kMatchThreshold = 0.5;
inline constexpr double kVelocityCutoff = 51.62;
inline constexpr double kEmptyFrameThreshold = 0.13;

class DegenerateBox : public Error {
public:
    using Error::Error;
};

class EmptySeries : public Error {
public:
    using Error::Error;
};

struct Box {
    double x1 = 0;
    double y1 = 0;
    double x2 = 0;
    double y2 = 0;

    auto area() const -> double { return (x2 - x1) * (y2 - y1); }
    auto center_x() const -> double { return (x1 + x2) / 2; }
    auto center_y() const -> double { return (y1 + y2) / 2; }
};

auto box_from_value(const Value& v) -> Box;
auto to_value(const Box& b) -> Value;

/// Intersection over union; throws DegenerateBox for zero-area boxes.
auto iou(const Box& a, const Box& b) -> double;
/// Box center inside the middle half of the image on both axes.
auto is_center(const Box& b) -> bool;
auto center_distance(const Box& a, const Box& b) -> double;

struct DetectionRecord {
    std::int64_t seq_id = 0;
    std::int64_t frame_id = 0;
    std::vector<Box> boxes;
    std::vector<std::string> labels;
};

auto detection_from_value(const Value& v) -> DetectionRecord;
auto to_value(const DetectionRecord& d) -> Value;

/// One side may be empty: an unmatched box pairs with "No Match".
struct BoxMatch {
    std::optional<std::size_t> first;
    std::optional<std::size_t> second;

    friend auto operator==(const BoxMatch&, const BoxMatch&) -> bool = default;
};

/// Greedy max-IoU matching: repeatedly pair the still-unmatched boxes with
/// the highest IoU >= thresh, ties to the lower index in f1, then f2.
/// Output: f1 boxes in index order (matched or not), then unmatched f2 boxes.
auto match_boxes_greedy(const DetectionRecord& f1, const DetectionRecord& f2,
                        double thresh = kMatchThreshold) -> std::vector<BoxMatch>;

/// Follows every box of p through q into r. Each chain is
/// [seq_id, [fp, fq, fr], [label_p, label_q, label_r], [box_p, box_q, box_r]]
/// with "No Match" / null where the chain breaks.
auto match_three(const DetectionRecord& p, const DetectionRecord& q, const DetectionRecord& r,
                 double thresh = kMatchThreshold) -> Value;

/// LQ - 1.5 IQR and UQ + 1.5 IQR with linearly interpolated quartiles.
auto iqr_bounds(std::span<const double> values) -> std::pair<double, double>;
/// Strictly outside the bounds.
auto outside_bounds(double v, std::pair<double, double> bounds) -> bool;

struct GroundTruth {
    std::string kind;
    Value key;
};

struct Generated {
    Table table;
    std::vector<GroundTruth> truth;
};

/// Detections of objects moving in separate horizontal lanes. With
/// probability drop_rate per object and frame, an object centered in frames
/// k and k+1 is removed from frame k+2 ("disappearance", key
/// [seq_id, k, box_k]). With teleport_rate the object jumps 60 px between
/// two frames ("teleport", key [seq_id, k]).
auto gen_detections(std::uint64_t seed, int n_seqs, int frames_per_seq, double drop_rate,
                    double teleport_rate = 0.0) -> Generated;

/// Smooth periodic vital-sign series with missing and imputed entries;
/// with outlier_rate per series one imputed entry is pushed more than
/// 3 IQR past its quartile ("outlier", key [sample_id, feature, t]).
auto gen_timeseries(std::uint64_t seed, int n_samples, int n_features, int t_len,
                    double outlier_rate) -> Generated;

/// Camera-trap style (seq_id, frame_id, label) rows; with mixed_rate a
/// sequence carries more than one animal ("multilabel", key seq_id).
auto gen_sequence_labels(std::uint64_t seed, int n_seqs, int frames_per_seq, double mixed_rate)
    -> Generated;

/// Consecutive-frame pixel differences with labels; with mislabel_rate an
/// empty frame with a small nonzero difference is labeled as an animal
/// ("mislabel", key [seq_id, frame_id]).
auto gen_frame_diffs(std::uint64_t seed, int n_seqs, int frames_per_seq, double mislabel_rate)
    -> Generated;

// Constraint queries. All run through the engine.

/// preds x next frame x frame after next, matched and flattened into chains.
auto temporal_matches_plan(const std::string& preds = "preds") -> QueryPlan;
auto q_temporal_consistency(const Database& db) -> Table;
/// Groups [[seq_id, frame], chains] with a center displacement above cutoff.
auto q_high_velocity(const Database& db, double cutoff = kVelocityCutoff) -> Table;
/// Imputed `series` entries strictly outside their series' IQR bounds.
/// Bounds come from observed values only, or from all values if use_all_values.
auto q_iqr_outliers(const Database& db, bool use_all_values) -> Table;
auto iqr_outliers_program(bool use_all_values) -> Program;
auto q_multilabel_sequences(const Database& db) -> Table;
auto q_empty_frame_mislabels(const Database& db, double thresh = kEmptyFrameThreshold) -> Table;

// Report keys comparable with GroundTruth keys.
auto temporal_key(const Value& row) -> Value;
auto velocity_key(const Value& row) -> Value;
auto outlier_key(const Value& row) -> Value;
auto multilabel_key(const Value& row) -> Value;
auto mislabel_key(const Value& row) -> Value;

/// Adds match_three, is_center, center_dist, iou and iqr_bounds.
void register_builtins(qlang::BuiltinRegistry& registry);
/// Core builtins plus the ones above.
auto builtins() -> const qlang::BuiltinRegistry&;

struct SuiteConfig {
    std::uint64_t seed = 7;
    int detection_seqs = 40;
    int detection_frames = 30;
    double drop_rate = 0.01;
    double teleport_rate = 0.005;
    int series_samples = 40;
    int series_features = 4;
    int series_length = 48;
    double outlier_rate = 0.3;
    int label_seqs = 60;
    int label_frames = 20;
    double mixed_rate = 0.2;
    int diff_seqs = 30;
    int diff_frames = 40;
    double mislabel_rate = 0.1;
    double velocity_cutoff = kVelocityCutoff;
    double empty_threshold = kEmptyFrameThreshold;
};

struct ConstraintScore {
    std::string name;
    std::size_t reported = 0;
    std::size_t truth = 0;
    std::size_t hits = 0;
    /// Vacuously 1.0 with nothing reported.
    double precision = 1.0;
    /// 1.0 when there is no ground truth.
    double recall = 1.0;
};

struct SuiteReport {
    std::vector<ConstraintScore> scores;
    double seconds = 0.0;

    auto render() const -> std::string;
    auto to_jsonl() const -> std::string;
};

struct SuiteData {
    Generated detections;
    Generated series;
    Generated labels;
    Generated diffs;

    auto database() const -> Database;
};

auto generate(const SuiteConfig& cfg) -> SuiteData;
auto score(std::string name, const Table& reported, Value (*key)(const Value&),
           const std::vector<GroundTruth>& truth, std::string_view kind) -> ConstraintScore;
auto run_suite(std::uint64_t seed) -> SuiteReport;
auto run_suite(const SuiteConfig& cfg) -> SuiteReport;

/// Writes preds.jsonl, series.jsonl, labels.jsonl, frame_diffs.jsonl and
/// truth.jsonl for the corpus scripts.
void write_datasets(const std::filesystem::path& dir, const SuiteConfig& cfg);

}  // namespace objql::corpus
