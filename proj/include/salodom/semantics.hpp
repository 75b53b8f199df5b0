#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace salodom {

/// Per-point class ids. `label_names` is informational.
struct SemanticMap {
    std::vector<std::uint32_t> labels;
    std::map<std::uint32_t, std::string> label_names;

    std::size_t size() const { return labels.size(); }
};

/// Per-point c_i in {0.0, 1.0}; 0 = dynamic, 1 = static.
struct BinaryMask {
    std::vector<double> values;
};

enum class MotionClass { Dynamic, Static, Ignore };

struct LabelEntry {
    std::string name;
    MotionClass motion = MotionClass::Ignore;
};

struct BinarizationTable {
    std::map<std::uint32_t, LabelEntry> entries;
    /// Value assigned to classes marked ignore (and unlabeled points).
    double ignore_value = 1.0;
    /// When set, labels missing from `entries` receive this value instead of
    /// raising an error.
    std::optional<double> unknown_value;

    /// Raw SemanticKITTI ids, with moving-* variants sharing their base class.
    static BinarizationTable semantic_kitti();
};

/// Raw SemanticKITTI id to the 19-class learning id (0 = unlabeled/ignored).
std::uint32_t semantic_kitti_learning_id(std::uint32_t raw_id);
inline constexpr int kSemanticKittiLearningClasses = 20;

MotionClass parse_motion_class(const std::string& token);
const char* motion_class_name(MotionClass motion);

BinaryMask binarize_semantics(std::span<const std::uint32_t> labels, const BinarizationTable& table);
inline BinaryMask binarize_semantics(const SemanticMap& sem, const BinarizationTable& table) {
    return binarize_semantics(std::span<const std::uint32_t>(sem.labels), table);
}

struct MiouResult {
    /// IoU per class id; NaN for classes absent from both prediction and ground truth.
    std::vector<double> per_class;
    std::vector<std::uint8_t> present;
    double mean = 0.0;
    std::size_t scored_points = 0;
};

MiouResult miou(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> gt, int num_classes,
                const std::set<std::uint32_t>& ignore);

}  // namespace salodom
