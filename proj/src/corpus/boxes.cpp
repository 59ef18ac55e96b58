#include <objql/corpus.hpp>

#include <algorithm>
#include <cmath>

namespace objql::corpus {

auto box_from_value(const Value& v) -> Box {
    const auto& xs = v.as_list();
    if (xs.size() != 4) {
        throw TypeMismatch("box must have 4 coordinates, got " + std::to_string(xs.size()));
    }
    return {xs[0].as_number(), xs[1].as_number(), xs[2].as_number(), xs[3].as_number()};
}

auto to_value(const Box& b) -> Value { return Value::list({b.x1, b.y1, b.x2, b.y2}); }

auto iou(const Box& a, const Box& b) -> double {
    if (!(a.area() > 0) || !(b.area() > 0)) {
        throw DegenerateBox("box has zero area");
    }
    double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (w <= 0 || h <= 0) {
        return 0.0;
    }
    double inter = w * h;
    return inter / (a.area() + b.area() - inter);
}

auto is_center(const Box& b) -> bool {
    double cx = b.center_x();
    double cy = b.center_y();
    return cx >= kImageWidth * 0.25 && cx <= kImageWidth * 0.75 && cy >= kImageHeight * 0.25 &&
           cy <= kImageHeight * 0.75;
}

auto center_distance(const Box& a, const Box& b) -> double {
    return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
}

auto detection_from_value(const Value& v) -> DetectionRecord {
    auto field = [&](std::string_view name) -> const Value& {
        const Value* f = v.find(name);
        if (!f) {
            throw TypeMismatch("detection record lacks '" + std::string(name) + "'");
        }
        return *f;
    };
    DetectionRecord d;
    d.seq_id = field("seq_id").as_int();
    d.frame_id = field("frame_id").as_int();
    for (const auto& b : field("boxes").as_list()) {
        d.boxes.push_back(box_from_value(b));
    }
    for (const auto& l : field("labels").as_list()) {
        d.labels.push_back(l.as_text());
    }
    if (d.boxes.size() != d.labels.size()) {
        throw TypeMismatch("detection record has " + std::to_string(d.boxes.size()) +
                           " boxes but " + std::to_string(d.labels.size()) + " labels");
    }
    return d;
}

auto to_value(const DetectionRecord& d) -> Value {
    ValueList boxes;
    ValueList labels;
    for (const auto& b : d.boxes) {
        boxes.push_back(to_value(b));
    }
    for (const auto& l : d.labels) {
        labels.emplace_back(l);
    }
    return Value::map({{"seq_id", d.seq_id},
                       {"frame_id", d.frame_id},
                       {"boxes", Value::list(std::move(boxes))},
                       {"labels", Value::list(std::move(labels))}});
}

auto match_boxes_greedy(const DetectionRecord& f1, const DetectionRecord& f2, double thresh)
    -> std::vector<BoxMatch> {
    struct Candidate {
        double score;
        std::size_t i;
        std::size_t j;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < f1.boxes.size(); ++i) {
        for (std::size_t j = 0; j < f2.boxes.size(); ++j) {
            double s = iou(f1.boxes[i], f2.boxes[j]);
            if (s >= thresh) {
                candidates.push_back({s, i, j});
            }
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });

    std::vector<std::optional<std::size_t>> partner(f1.boxes.size());
    std::vector<bool> taken(f2.boxes.size(), false);
    for (const auto& c : candidates) {
        if (!partner[c.i] && !taken[c.j]) {
            partner[c.i] = c.j;
            taken[c.j] = true;
        }
    }
    std::vector<BoxMatch> out;
    for (std::size_t i = 0; i < f1.boxes.size(); ++i) {
        out.push_back({i, partner[i]});
    }
    for (std::size_t j = 0; j < f2.boxes.size(); ++j) {
        if (!taken[j]) {
            out.push_back({std::nullopt, j});
        }
    }
    return out;
}

auto match_three(const DetectionRecord& p, const DetectionRecord& q, const DetectionRecord& r,
                 double thresh) -> Value {
    auto pq = match_boxes_greedy(p, q, thresh);
    auto qr = match_boxes_greedy(q, r, thresh);
    // qr lists q boxes first, in index order.
    auto next_of = [&](std::size_t j) { return qr[j].second; };

    Value frames = Value::list({p.frame_id, q.frame_id, r.frame_id});
    ValueList chains;
    for (std::size_t i = 0; i < p.boxes.size(); ++i) {
        std::optional<std::size_t> j = pq[i].second;
        std::optional<std::size_t> k = j ? next_of(*j) : std::nullopt;
        Value labels = Value::list({
            p.labels[i],
            j ? Value(q.labels[*j]) : Value(kNoMatch),
            k ? Value(r.labels[*k]) : Value(kNoMatch),
        });
        Value boxes = Value::list({
            to_value(p.boxes[i]),
            j ? to_value(q.boxes[*j]) : Value(),
            k ? to_value(r.boxes[*k]) : Value(),
        });
        chains.push_back(Value::list({p.seq_id, frames, labels, boxes}));
    }
    return Value::list(std::move(chains));
}

auto iqr_bounds(std::span<const double> values) -> std::pair<double, double> {
    if (values.empty()) {
        throw EmptySeries("iqr_bounds of an empty series");
    }
    std::vector<double> xs(values.begin(), values.end());
    double lq = qlang::linear_quantile(xs, 0.25);
    double uq = qlang::linear_quantile(xs, 0.75);
    double spread = uq - lq;
    return {lq - 1.5 * spread, uq + 1.5 * spread};
}

auto outside_bounds(double v, std::pair<double, double> bounds) -> bool {
    return v < bounds.first || v > bounds.second;
}

}  // namespace objql::corpus
