#include "salodom/semantics.hpp"

#include <cmath>
#include <limits>

#include "salodom/error.hpp"

namespace salodom {

namespace {

struct KittiClass {
    std::uint32_t raw_id;
    const char* name;
    std::uint32_t learning_id;
};

// SemanticKITTI raw label ids and their 19-class learning mapping.
constexpr KittiClass kKittiClasses[] = {
    {0, "unlabeled", 0},
    {1, "outlier", 0},
    {10, "car", 1},
    {11, "bicycle", 2},
    {13, "bus", 5},
    {15, "motorcycle", 3},
    {16, "on-rails", 5},
    {18, "truck", 4},
    {20, "other-vehicle", 5},
    {30, "person", 6},
    {31, "bicyclist", 7},
    {32, "motorcyclist", 8},
    {40, "road", 9},
    {44, "parking", 10},
    {48, "sidewalk", 11},
    {49, "other-ground", 12},
    {50, "building", 13},
    {51, "fence", 14},
    {52, "other-structure", 0},
    {60, "lane-marking", 9},
    {70, "vegetation", 15},
    {71, "trunk", 16},
    {72, "terrain", 17},
    {80, "pole", 18},
    {81, "traffic-sign", 19},
    {99, "other-object", 0},
    {252, "moving-car", 1},
    {253, "moving-bicyclist", 7},
    {254, "moving-person", 6},
    {255, "moving-motorcyclist", 8},
    {256, "moving-on-rails", 5},
    {257, "moving-bus", 5},
    {258, "moving-truck", 4},
    {259, "moving-other-vehicle", 5},
};

// Learning ids 1-8 are the movable classes, 9-19 the static ones.
MotionClass motion_of_learning_id(std::uint32_t learning_id) {
    if (learning_id == 0) return MotionClass::Ignore;
    return learning_id <= 8 ? MotionClass::Dynamic : MotionClass::Static;
}

}  // namespace

BinarizationTable BinarizationTable::semantic_kitti() {
    BinarizationTable table;
    for (const auto& c : kKittiClasses) {
        table.entries[c.raw_id] = LabelEntry{c.name, motion_of_learning_id(c.learning_id)};
    }
    return table;
}

std::uint32_t semantic_kitti_learning_id(std::uint32_t raw_id) {
    for (const auto& c : kKittiClasses) {
        if (c.raw_id == raw_id) return c.learning_id;
    }
    return 0;
}

MotionClass parse_motion_class(const std::string& token) {
    if (token == "dynamic") return MotionClass::Dynamic;
    if (token == "static") return MotionClass::Static;
    if (token == "ignore") return MotionClass::Ignore;
    fail(ErrorCode::Format, "unknown motion class '" + token + "' (expected dynamic, static or ignore)");
}

const char* motion_class_name(MotionClass motion) {
    switch (motion) {
        case MotionClass::Dynamic:
            return "dynamic";
        case MotionClass::Static:
            return "static";
        case MotionClass::Ignore:
            return "ignore";
    }
    return "ignore";
}

BinaryMask binarize_semantics(std::span<const std::uint32_t> labels, const BinarizationTable& table) {
    BinaryMask out;
    out.values.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto it = table.entries.find(labels[i]);
        if (it == table.entries.end()) {
            if (!table.unknown_value) {
                fail(ErrorCode::InvalidArgument, "unmapped semantic label " + std::to_string(labels[i]));
            }
            out.values[i] = *table.unknown_value;
            continue;
        }
        switch (it->second.motion) {
            case MotionClass::Dynamic:
                out.values[i] = 0.0;
                break;
            case MotionClass::Static:
                out.values[i] = 1.0;
                break;
            case MotionClass::Ignore:
                out.values[i] = table.ignore_value;
                break;
        }
    }
    return out;
}

MiouResult miou(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> gt, int num_classes,
                const std::set<std::uint32_t>& ignore) {
    if (pred.size() != gt.size()) {
        fail(ErrorCode::InvalidArgument, "miou: prediction has " + std::to_string(pred.size()) +
                                             " labels but ground truth has " + std::to_string(gt.size()));
    }
    if (num_classes <= 0) fail(ErrorCode::InvalidArgument, "miou: num_classes must be positive");
    const auto n_classes = static_cast<std::size_t>(num_classes);
    auto check = [&](std::uint32_t label) {
        if (label >= n_classes && !ignore.count(label)) {
            fail(ErrorCode::InvalidArgument, "miou: label " + std::to_string(label) + " out of range");
        }
    };

    std::vector<std::size_t> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
    MiouResult out;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        check(gt[i]);
        check(pred[i]);
        if (ignore.count(gt[i])) continue;
        ++out.scored_points;
        const bool pred_scored = !ignore.count(pred[i]);
        if (pred_scored && pred[i] == gt[i]) {
            ++tp[gt[i]];
        } else {
            ++fn[gt[i]];
            if (pred_scored) ++fp[pred[i]];
        }
    }
    if (out.scored_points == 0) fail(ErrorCode::InvalidArgument, "no scorable points");

    out.per_class.assign(n_classes, std::numeric_limits<double>::quiet_NaN());
    out.present.assign(n_classes, 0);
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        const std::size_t denom = tp[c] + fp[c] + fn[c];
        if (denom == 0 || ignore.count(static_cast<std::uint32_t>(c))) continue;
        out.per_class[c] = static_cast<double>(tp[c]) / static_cast<double>(denom);
        out.present[c] = 1;
        sum += out.per_class[c];
        ++counted;
    }
    out.mean = sum / static_cast<double>(counted);
    return out;
}

}  // namespace salodom
