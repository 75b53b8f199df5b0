#include "salodom/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "salodom/error.hpp"

namespace salodom {

std::vector<double> trajectory_distances(const Trajectory& traj) {
    std::vector<double> dist(traj.size(), 0.0);
    for (std::size_t i = 1; i < traj.size(); ++i) {
        dist[i] = dist[i - 1] + (traj.poses[i].translation() - traj.poses[i - 1].translation()).norm();
    }
    return dist;
}

namespace {

// Tolerance on the segment-end test so that exactly reached lengths count.
constexpr double kLengthSlack = 1e-9;

std::size_t last_frame_for_length(const std::vector<double>& dist, std::size_t first, double length) {
    const double goal = dist[first] + length - kLengthSlack * length;
    for (std::size_t i = first; i < dist.size(); ++i) {
        if (dist[i] >= goal) return i;
    }
    return dist.size();
}

}  // namespace

EvalReport kitti_relative_errors(const Trajectory& estimate, const Trajectory& ground_truth,
                                 const std::string& sequence) {
    if (estimate.size() != ground_truth.size()) {
        fail(ErrorCode::InvalidArgument, "trajectory length mismatch: estimate has " + std::to_string(estimate.size()) +
                                             " poses, ground truth " + std::to_string(ground_truth.size()));
    }
    if (ground_truth.size() < 2) fail(ErrorCode::InvalidArgument, "trajectories need at least 2 poses");

    EvalReport report;
    report.sequence = sequence;
    const std::vector<double> dist = trajectory_distances(ground_truth);

    double t_sum = 0.0;
    double r_sum = 0.0;
    for (double length : kKittiSegmentLengths) {
        SegmentError seg;
        seg.length = length;
        for (std::size_t first = 0; first < ground_truth.size(); ++first) {
            const std::size_t last = last_frame_for_length(dist, first, length);
            if (last >= ground_truth.size()) break;  // later starts cannot reach it either
            const RigidTransform gt_delta = ground_truth.poses[first].inverse() * ground_truth.poses[last];
            const RigidTransform est_delta = estimate.poses[first].inverse() * estimate.poses[last];
            const RigidTransform error = gt_delta.inverse() * est_delta;
            const double t_err = 100.0 * error.translation().norm() / length;
            const double r_err = error.angle() * 180.0 / std::numbers::pi * 100.0 / length;
            seg.t_err += t_err;
            seg.r_err += r_err;
            ++seg.samples;
        }
        if (seg.samples == 0) continue;
        t_sum += seg.t_err;
        r_sum += seg.r_err;
        report.samples += seg.samples;
        seg.t_err /= static_cast<double>(seg.samples);
        seg.r_err /= static_cast<double>(seg.samples);
        report.breakdown.push_back(seg);
    }
    if (report.samples == 0) {
        report.too_short = true;
    } else {
        report.t_rel = t_sum / static_cast<double>(report.samples);
        report.r_rel = r_sum / static_cast<double>(report.samples);
    }
    return report;
}

namespace {

std::string fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

}  // namespace

std::string format_report_text(const EvalReport& report) {
    std::ostringstream os;
    if (!report.sequence.empty()) os << "sequence " << report.sequence << "\n";
    if (report.too_short) {
        os << "too short: ground truth covers less than 100 m, no segments evaluated\n";
        return os.str();
    }
    os << "t_rel " << fixed(report.t_rel, 3) << " %\n";
    os << "r_rel " << fixed(report.r_rel, 3) << " deg/100m\n";
    os << "length_m  samples  t_err_%  r_err_deg/100m\n";
    for (const auto& seg : report.breakdown) {
        char line[128];
        std::snprintf(line, sizeof line, "%8.0f  %7zu  %7.3f  %14.3f\n", seg.length, seg.samples, seg.t_err,
                      seg.r_err);
        os << line;
    }
    return os.str();
}

std::string format_report_csv(const EvalReport& report) {
    std::ostringstream os;
    os << "sequence,length_m,samples,t_err_percent,r_err_deg_per_100m\n";
    for (const auto& seg : report.breakdown) {
        os << report.sequence << ',' << fixed(seg.length, 0) << ',' << seg.samples << ',' << fixed(seg.t_err, 6)
           << ',' << fixed(seg.r_err, 6) << '\n';
    }
    os << report.sequence << ",mean," << report.samples << ',' << fixed(report.t_rel, 6) << ','
       << fixed(report.r_rel, 6) << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// Saliency metrics

namespace {

struct JointValues {
    std::vector<double> pred;
    std::vector<double> gt;
};

JointValues joint_valid(const PointSaliency& pred, const PointSaliency& gt) {
    if (pred.size() != gt.size()) {
        fail(ErrorCode::InvalidArgument, "saliency maps differ in length (" + std::to_string(pred.size()) + " vs " +
                                             std::to_string(gt.size()) + ")");
    }
    JointValues out;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!pred.valid[i] || !gt.valid[i]) continue;
        if (!std::isfinite(pred.values[i]) || !std::isfinite(gt.values[i])) {
            fail(ErrorCode::InvalidArgument, "non-finite saliency value at index " + std::to_string(i));
        }
        out.pred.push_back(pred.values[i]);
        out.gt.push_back(gt.values[i]);
    }
    return out;
}

// Sum-normalize non-negative values into a distribution.
std::vector<double> to_distribution(const std::vector<double>& values, const char* which) {
    double sum = 0.0;
    for (double v : values) {
        if (v < 0.0) fail(ErrorCode::InvalidArgument, std::string(which) + " map has negative values");
        sum += v;
    }
    if (!(sum > 0.0)) fail(ErrorCode::InvalidArgument, std::string(which) + " map has zero mass");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / sum;
    return out;
}

std::vector<double> zscore(const std::vector<double>& values) {
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / n);
    // Rounding in the mean leaves a tiny spread on constant input.
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    if (!(sd > 1e-12 * scale)) fail(ErrorCode::InvalidArgument, "constant map");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / sd;
    return out;
}

}  // namespace

double saliency_cc(const PointSaliency& pred, const PointSaliency& gt) {
    const JointValues j = joint_valid(pred, gt);
    if (j.pred.size() < 2) fail(ErrorCode::InvalidArgument, "need at least 2 jointly valid points");
    const std::vector<double> a = zscore(j.pred);
    const std::vector<double> b = zscore(j.gt);
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

double saliency_sim(const PointSaliency& pred, const PointSaliency& gt) {
    const JointValues j = joint_valid(pred, gt);
    if (j.pred.empty()) fail(ErrorCode::InvalidArgument, "no jointly valid points");
    const std::vector<double> p = to_distribution(j.pred, "prediction");
    const std::vector<double> g = to_distribution(j.gt, "ground truth");
    double sim = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sim += std::min(p[i], g[i]);
    return sim;
}

double saliency_kld(const PointSaliency& pred, const PointSaliency& gt) {
    const JointValues j = joint_valid(pred, gt);
    if (j.pred.empty()) fail(ErrorCode::InvalidArgument, "no jointly valid points");
    const std::vector<double> p = to_distribution(j.pred, "prediction");
    const std::vector<double> g = to_distribution(j.gt, "ground truth");
    double kld = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (g[i] > 0.0) kld += g[i] * std::log(g[i] / (p[i] + kKldEpsilon));
    }
    return kld;
}

SaliencyScores saliency_scores(const PointSaliency& pred, const PointSaliency& gt) {
    return {saliency_cc(pred, gt), saliency_sim(pred, gt), saliency_kld(pred, gt)};
}

PointSaliency all_valid(std::vector<double> values) {
    PointSaliency s;
    s.valid.assign(values.size(), 1);
    s.values = std::move(values);
    return s;
}

}  // namespace salodom
