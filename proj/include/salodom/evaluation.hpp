#pragma once

#include <array>
#include <string>
#include <vector>

#include "salodom/odometry.hpp"
#include "salodom/saliency_transfer.hpp"

namespace salodom {

/// Subsequence lengths in meters, as in the KITTI odometry devkit.
inline constexpr std::array<double, 8> kKittiSegmentLengths = {100, 200, 300, 400, 500, 600, 700, 800};

struct SegmentError {
    double length = 0.0;
    double t_err = 0.0;  // percent
    double r_err = 0.0;  // deg / 100 m
    std::size_t samples = 0;
};

struct EvalReport {
    std::string sequence;
    double t_rel = 0.0;  // percent
    double r_rel = 0.0;  // deg / 100 m
    std::size_t samples = 0;
    /// Only lengths with at least one sample.
    std::vector<SegmentError> breakdown;
    bool too_short = false;
};

/// Cumulative ground-truth path length at every frame.
std::vector<double> trajectory_distances(const Trajectory& traj);

/// KITTI relative pose errors: every start frame (step 1) and every segment
/// length. A segment ends at the first frame whose cumulative distance reaches
/// start + length. Errors are divided by the nominal length.
EvalReport kitti_relative_errors(const Trajectory& estimate, const Trajectory& ground_truth,
                                 const std::string& sequence = {});

std::string format_report_text(const EvalReport& report);
std::string format_report_csv(const EvalReport& report);

struct SaliencyScores {
    double cc = 0.0;
    double sim = 0.0;
    double kld = 0.0;
};

inline constexpr double kKldEpsilon = 1e-12;

/// Pearson correlation of the z-scored maps over jointly valid points.
double saliency_cc(const PointSaliency& pred, const PointSaliency& gt);
/// Histogram intersection of the sum-normalized maps.
double saliency_sim(const PointSaliency& pred, const PointSaliency& gt);
/// KL(gt || pred) of the sum-normalized maps, with kKldEpsilon added to pred.
double saliency_kld(const PointSaliency& pred, const PointSaliency& gt);

SaliencyScores saliency_scores(const PointSaliency& pred, const PointSaliency& gt);

/// Treats every value as valid.
PointSaliency all_valid(std::vector<double> values);

}  // namespace salodom
