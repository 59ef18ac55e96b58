#include <objql/corpus.hpp>
#include <objql/ingest.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <unordered_set>

namespace objql::corpus {

auto SuiteData::database() const -> Database {
    Database db;
    db.put("preds", detections.table);
    db.put("series", series.table);
    db.put("labels", labels.table);
    db.put("frame_diffs", diffs.table);
    return db;
}

auto generate(const SuiteConfig& cfg) -> SuiteData {
    return {
        gen_detections(cfg.seed, cfg.detection_seqs, cfg.detection_frames, cfg.drop_rate,
                       cfg.teleport_rate),
        gen_timeseries(cfg.seed + 1, cfg.series_samples, cfg.series_features, cfg.series_length,
                       cfg.outlier_rate),
        gen_sequence_labels(cfg.seed + 2, cfg.label_seqs, cfg.label_frames, cfg.mixed_rate),
        gen_frame_diffs(cfg.seed + 3, cfg.diff_seqs, cfg.diff_frames, cfg.mislabel_rate),
    };
}

auto score(std::string name, const Table& reported, Value (*key)(const Value&),
           const std::vector<GroundTruth>& truth, std::string_view kind) -> ConstraintScore {
    std::unordered_set<CanonicalKey, CanonicalKeyHash> reported_keys;
    for (const auto& row : reported) {
        reported_keys.insert(canonical_encode(key(row)));
    }
    std::unordered_set<CanonicalKey, CanonicalKeyHash> truth_keys;
    for (const auto& t : truth) {
        if (t.kind == kind) {
            truth_keys.insert(canonical_encode(t.key));
        }
    }
    ConstraintScore s;
    s.name = std::move(name);
    s.reported = reported_keys.size();
    s.truth = truth_keys.size();
    for (const auto& k : reported_keys) {
        s.hits += truth_keys.count(k);
    }
    if (s.reported > 0) {
        s.precision = static_cast<double>(s.hits) / static_cast<double>(s.reported);
    }
    if (s.truth > 0) {
        s.recall = static_cast<double>(s.hits) / static_cast<double>(s.truth);
    }
    return s;
}

auto run_suite(std::uint64_t seed) -> SuiteReport {
    SuiteConfig cfg;
    cfg.seed = seed;
    return run_suite(cfg);
}

auto run_suite(const SuiteConfig& cfg) -> SuiteReport {
    auto start = std::chrono::steady_clock::now();
    SuiteData data = generate(cfg);
    Database db = data.database();

    SuiteReport r;
    r.scores.push_back(score("temporal_consistency", q_temporal_consistency(db), temporal_key,
                             data.detections.truth, "disappearance"));
    r.scores.push_back(score("high_velocity", q_high_velocity(db, cfg.velocity_cutoff),
                             velocity_key, data.detections.truth, "teleport"));
    r.scores.push_back(score("iqr_outliers_observed", q_iqr_outliers(db, false), outlier_key,
                             data.series.truth, "outlier"));
    r.scores.push_back(score("iqr_outliers_all", q_iqr_outliers(db, true), outlier_key,
                             data.series.truth, "outlier"));
    r.scores.push_back(score("multilabel_sequences", q_multilabel_sequences(db), multilabel_key,
                             data.labels.truth, "multilabel"));
    r.scores.push_back(score("empty_frame_mislabels",
                             q_empty_frame_mislabels(db, cfg.empty_threshold), mislabel_key,
                             data.diffs.truth, "mislabel"));
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

auto SuiteReport::render() const -> std::string {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-24s %8s %8s %8s %9s %9s\n", "constraint", "reported",
                  "truth", "hits", "precision", "recall");
    out += line;
    for (const auto& s : scores) {
        std::snprintf(line, sizeof line, "%-24s %8zu %8zu %8zu %9.3f %9.3f\n", s.name.c_str(),
                      s.reported, s.truth, s.hits, s.precision, s.recall);
        out += line;
    }
    std::snprintf(line, sizeof line, "elapsed %.3fs\n", seconds);
    out += line;
    return out;
}

auto SuiteReport::to_jsonl() const -> std::string {
    std::string out;
    for (const auto& s : scores) {
        out += ingest::to_json_line(Value::map({
            {"constraint", s.name},
            {"reported", static_cast<std::int64_t>(s.reported)},
            {"truth", static_cast<std::int64_t>(s.truth)},
            {"hits", static_cast<std::int64_t>(s.hits)},
            {"precision", s.precision},
            {"recall", s.recall},
        }));
        out += '\n';
    }
    return out;
}

void write_datasets(const std::filesystem::path& dir, const SuiteConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    SuiteData data = generate(cfg);
    ingest::save_jsonl(data.detections.table, dir / "preds.jsonl");
    ingest::save_jsonl(data.series.table, dir / "series.jsonl");
    ingest::save_jsonl(data.labels.table, dir / "labels.jsonl");
    ingest::save_jsonl(data.diffs.table, dir / "frame_diffs.jsonl");

    ValueList truth;
    for (const auto* g : {&data.detections, &data.series, &data.labels, &data.diffs}) {
        for (const auto& t : g->truth) {
            truth.push_back(Value::map({{"kind", t.kind}, {"key", t.key}}));
        }
    }
    ingest::save_jsonl(Table(std::move(truth)), dir / "truth.jsonl");
}

}  // namespace objql::corpus
