// salodom command-line front end. Talks to the library only through the C API.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "salodom/salodom.h"

namespace fs = std::filesystem;

namespace {

struct CliError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(sod_status st, const std::string& context = "") {
    if (st == SOD_OK) return;
    std::string msg = sod_last_error();
    if (msg.empty()) msg = sod_status_name(st);
    throw CliError(context.empty() ? msg : context + ": " + msg);
}

template <typename T, void (*Destroy)(T*)>
struct Deleter {
    void operator()(T* p) const { Destroy(p); }
};
using Cloud = std::unique_ptr<sod_cloud, Deleter<sod_cloud, sod_cloud_destroy>>;
using FrameHandle = std::unique_ptr<sod_frame, Deleter<sod_frame, sod_frame_destroy>>;
using Traj = std::unique_ptr<sod_trajectory, Deleter<sod_trajectory, sod_trajectory_destroy>>;
using Array = std::unique_ptr<sod_array, Deleter<sod_array, sod_array_destroy>>;
using Image = std::unique_ptr<sod_image, Deleter<sod_image, sod_image_destroy>>;
using LabelTable = std::unique_ptr<sod_label_table, Deleter<sod_label_table, sod_label_table_destroy>>;

Traj read_traj(const std::string& path) {
    sod_trajectory* t = nullptr;
    check(sod_trajectory_read(path.c_str(), &t));
    return Traj(t);
}

Array read_channel(const fs::path& path) {
    sod_array* a = nullptr;
    check(sod_channel_read(path.string().c_str(), &a));
    return Array(a);
}

// Files with `ext` in `dir`, sorted by file name.
std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& ext) {
    if (!fs::is_directory(dir)) throw CliError("directory not found: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });
    return out;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CliError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw CliError("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw CliError("write failed: " + path.string());
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---- transfer

struct TransferArgs {
    std::string calib;
    std::string camera_key = "P2";
    std::string scans;
    std::vector<std::string> images;
    std::string out;
    bool raw = false;
};

Image fused_image(const std::vector<fs::path>& paths) {
    std::vector<Image> owned;
    std::vector<const sod_image*> views;
    for (const auto& p : paths) {
        sod_image* img = nullptr;
        check(sod_image_read_pgm(p.string().c_str(), &img), p.string());
        owned.emplace_back(img);
        views.push_back(img);
    }
    sod_image* fused = nullptr;
    check(sod_image_fuse(views.data(), views.size(), &fused), paths.front().string());
    return Image(fused);
}

void transfer_one(const fs::path& scan, const std::vector<fs::path>& images, const TransferArgs& args,
                  const fs::path& out) {
    Image image = fused_image(images);
    sod_camera cam;
    check(sod_camera_read_kitti_calib(args.calib.c_str(), args.camera_key.c_str(), sod_image_width(image.get()),
                                      sod_image_height(image.get()), &cam));
    sod_cloud* c = nullptr;
    check(sod_cloud_read_kitti(scan.string().c_str(), &c));
    Cloud cloud(c);
    std::vector<double> values(sod_cloud_size(cloud.get()));
    std::vector<uint8_t> valid(values.size());
    const sod_image* img = image.get();
    check(sod_transfer_saliency(cloud.get(), &cam, &img, 1, args.raw ? 0 : 1, values.data(), valid.data()),
          scan.string());
    check(sod_channel_write(out.string().c_str(), values.data(), values.size()));
    const auto seen = std::count(valid.begin(), valid.end(), uint8_t{1});
    std::printf("%s %zu points, %zu visible\n", scan.filename().string().c_str(), values.size(),
                static_cast<size_t>(seen));
}

void cmd_transfer(const TransferArgs& args) {
    const fs::path scans(args.scans);
    if (fs::is_regular_file(scans)) {
        std::vector<fs::path> images(args.images.begin(), args.images.end());
        for (const auto& p : images) {
            if (!fs::is_regular_file(p)) throw CliError("image not found: " + p.string());
        }
        transfer_one(scans, images, args, args.out);
        return;
    }
    ensure_dir(args.out);
    for (const auto& scan : sorted_files(scans, ".bin")) {
        const std::string stem = scan.stem().string();
        std::vector<fs::path> images;
        for (const auto& dir : args.images) {
            const fs::path p = fs::path(dir) / (stem + ".pgm");
            if (!fs::is_regular_file(p)) throw CliError("missing saliency image " + p.string());
            images.push_back(p);
        }
        transfer_one(scan, images, args, fs::path(args.out) / (stem + ".ptch"));
    }
}

// ---- odom

struct OdomArgs {
    std::string sequence;
    std::string out;
    std::string config_file;
    std::string mapping;
    std::string weighting;
    double lambda = 0;
    int max_iters = 0;
    double tol = 0;
    double huber = -1;
    double max_corr_dist = 0;
    int stride = 0;
    bool hard_mask = false;
    bool parallel = false;
    unsigned threads = 0;
    unsigned seed = 0;
    size_t frames = 0;
    int height = 0, width = 0;
    double fov_up_deg = 1e9, fov_down_deg = 1e9;
    bool no_labels = false, no_saliency = false;
};

sod_weighting parse_weighting(const std::string& s) {
    if (s == "none") return SOD_WEIGHTING_NONE;
    if (s == "saliency" || s == "saliency_only") return SOD_WEIGHTING_SALIENCY;
    if (s == "semantic" || s == "semantic_only") return SOD_WEIGHTING_SEMANTIC;
    if (s == "both") return SOD_WEIGHTING_BOTH;
    throw CliError("unknown weighting mode '" + s + "'");
}

void cmd_odom(const OdomArgs& a) {
    const auto t_start = Clock::now();
    sod_odometry_config cfg;
    sod_odometry_config_default(&cfg);
    sod_projection proj;
    sod_projection_default(&proj);
    if (!a.config_file.empty()) check(sod_config_load(a.config_file.c_str(), &cfg, &proj));
    // Flags override the config file.
    if (!a.weighting.empty()) cfg.weighting = parse_weighting(a.weighting);
    if (a.lambda != 0) cfg.lambda = a.lambda;
    if (a.max_iters != 0) cfg.max_iterations = a.max_iters;
    if (a.tol != 0) cfg.convergence_tol = a.tol;
    if (a.huber >= 0) cfg.huber_delta = a.huber;
    if (a.max_corr_dist != 0) cfg.max_corr_dist = a.max_corr_dist;
    if (a.stride != 0) cfg.source_stride = a.stride;
    if (a.hard_mask) cfg.hard_mask = 1;
    if (a.height != 0) proj.height = a.height;
    if (a.width != 0) proj.width = a.width;
    if (a.fov_up_deg < 1e8) proj.fov_up = a.fov_up_deg * M_PI / 180.0;
    if (a.fov_down_deg < 1e8) proj.fov_down = a.fov_down_deg * M_PI / 180.0;

    size_t need = 0;
    check(sod_config_format(&cfg, &proj, nullptr, 0, &need));
    std::string cfg_text(need, '\0');
    check(sod_config_format(&cfg, &proj, cfg_text.data(), cfg_text.size(), &need));
    cfg_text.resize(need - 1);

    const fs::path root(a.sequence);
    const fs::path scan_dir = root / "velodyne";
    const fs::path label_dir = root / "labels";
    const fs::path sal_dir = root / "saliency";
    std::vector<fs::path> scans = sorted_files(scan_dir, ".bin");
    if (a.frames > 0 && scans.size() > a.frames) scans.resize(a.frames);
    if (scans.size() < 2) throw CliError("need at least 2 scans in " + scan_dir.string());
    const bool use_labels = !a.no_labels && fs::is_directory(label_dir);
    const bool use_saliency = !a.no_saliency && fs::is_directory(sal_dir);

    LabelTable table;
    if (use_labels) {
        sod_label_table* t = nullptr;
        if (a.mapping.empty()) {
            check(sod_label_table_default(&t));
        } else {
            check(sod_label_table_read(a.mapping.c_str(), &t));
        }
        table.reset(t);
    }

    const auto t_load = Clock::now();
    std::vector<FrameHandle> frames;
    frames.reserve(scans.size());
    for (const auto& scan : scans) {
        const std::string stem = scan.stem().string();
        sod_cloud* c = nullptr;
        check(sod_cloud_read_kitti(scan.string().c_str(), &c));
        Cloud cloud(c);
        if (use_labels) {
            const fs::path label = label_dir / (stem + ".label");
            if (!fs::is_regular_file(label)) throw CliError("missing label file " + label.string());
            check(sod_cloud_load_semantics(cloud.get(), label.string().c_str(), table.get()));
        }
        if (use_saliency) {
            const fs::path sal = sal_dir / (stem + ".ptch");
            if (!fs::is_regular_file(sal)) throw CliError("missing saliency file " + sal.string());
            check(sod_cloud_load_channel(cloud.get(), "saliency", sal.string().c_str()), sal.string());
        }
        sod_frame* f = nullptr;
        check(sod_frame_from_cloud(cloud.get(), &proj, &f), scan.string());
        frames.emplace_back(f);
    }
    const double load_s = seconds_since(t_load);

    const auto t_solve = Clock::now();
    std::vector<const sod_frame*> views;
    for (const auto& f : frames) views.push_back(f.get());
    std::vector<double> relative(12 * (frames.size() - 1));
    std::vector<sod_solve_diagnostics> diags(frames.size() - 1);
    const unsigned threads = a.parallel ? std::max(1u, a.threads) : 1u;
    const sod_status st = sod_run_sequence(views.data(), views.size(), &cfg, a.parallel ? 0 : 1, threads,
                                           relative.data(), diags.data());
    if (st != SOD_OK) {
        // The library reports "frame k: ..." with k the source frame index.
        std::string msg = sod_last_error();
        const auto colon = msg.find(':');
        if (msg.rfind("frame ", 0) == 0 && colon != std::string::npos) {
            try {
                const size_t k = std::stoul(msg.substr(6, colon - 6));
                if (k < scans.size()) msg = scans[k].string() + msg.substr(colon);
            } catch (const std::exception&) {
            }
        }
        throw CliError(msg);
    }
    for (size_t k = 0; k < diags.size(); ++k) {
        if (!std::isfinite(diags[k].final_loss)) {
            throw CliError(scans[k + 1].string() + ": final loss is not finite");
        }
    }
    const double solve_s = seconds_since(t_solve);

    const auto t_write = Clock::now();
    ensure_dir(a.out);
    sod_trajectory* t = nullptr;
    check(sod_trajectory_from_relative(relative.data(), diags.size(), &t));
    Traj traj(t);
    const fs::path out(a.out);
    check(sod_trajectory_write(traj.get(), (out / "poses.txt").string().c_str()));
    check(sod_trajectory_write_csv(traj.get(), (out / "trajectory.csv").string().c_str()));
    std::string diag_csv = "frame,final_loss,iterations,pairs,converged\n";
    char buf[160];
    for (size_t k = 0; k < diags.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.9g,%d,%zu,%d\n", k + 1, diags[k].final_loss, diags[k].iterations,
                      diags[k].pair_count, diags[k].converged);
        diag_csv += buf;
    }
    write_file(out / "diagnostics.csv", diag_csv);
    const double write_s = seconds_since(t_write);

    // Manifest: config as key=value (so it can be fed back with --config), the
    // rest as comments.
    std::ostringstream m;
    m << "# salodom " << sod_version() << "\n";
    m << "# sequence " << fs::absolute(root).string() << "\n";
    m << "# scans " << scans.size() << " (" << scans.front().filename().string() << " .. "
      << scans.back().filename().string() << ")\n";
    m << "# labels " << (use_labels ? fs::absolute(label_dir).string() : "none") << "\n";
    m << "# label_mapping " << (use_labels ? (a.mapping.empty() ? "builtin" : a.mapping) : "none") << "\n";
    m << "# saliency " << (use_saliency ? fs::absolute(sal_dir).string() : "none") << "\n";
    m << "# init " << (a.parallel ? "identity (parallel)" : "constant-velocity") << "\n";
    m << "# seed " << a.seed << "\n";
    std::snprintf(buf, sizeof buf, "# time load %.3f s, solve %.3f s, write %.3f s, total %.3f s\n", load_s, solve_s,
                  write_s, seconds_since(t_start));
    m << buf;
    m << cfg_text;
    write_file(out / "manifest.txt", m.str());

    std::printf("%zu frames, %zu pairs solved in %.2f s -> %s\n", scans.size(), diags.size(), solve_s,
                (out / "poses.txt").string().c_str());
}

// ---- eval-odom

void cmd_eval_odom(const std::string& est_path, const std::string& gt_path, const std::string& format,
                   const std::string& sequence, const std::string& out) {
    if (format != "text" && format != "csv") throw CliError("unknown format '" + format + "'");
    Traj est = read_traj(est_path);
    Traj gt = read_traj(gt_path);
    size_t need = 0;
    check(sod_eval_format(est.get(), gt.get(), sequence.c_str(), format.c_str(), nullptr, 0, &need));
    std::string text(need, '\0');
    check(sod_eval_format(est.get(), gt.get(), sequence.c_str(), format.c_str(), text.data(), text.size(), &need));
    text.resize(need - 1);
    if (out.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        write_file(out, text);
    }
}

// ---- eval-sal

// Six decimals without a sign on values that round to zero.
std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::strcmp(buf, "-0.000000") == 0 ? "0.000000" : buf;
}

void print_scores(bool csv, const std::string& name, double cc, double sim, double kld) {
    if (csv) {
        std::printf("%s,%s,%s,%s\n", name.c_str(), fixed6(cc).c_str(), fixed6(sim).c_str(), fixed6(kld).c_str());
    } else {
        std::printf("%-12s %10s %10s %10s\n", name.c_str(), fixed6(cc).c_str(), fixed6(sim).c_str(), fixed6(kld).c_str());
    }
}

void cmd_eval_sal(const std::string& pred, const std::string& gt, const std::string& format) {
    if (format != "text" && format != "csv") throw CliError("unknown format '" + format + "'");
    std::vector<std::pair<std::string, std::pair<fs::path, fs::path>>> pairs;
    if (fs::is_regular_file(pred)) {
        pairs.push_back({fs::path(pred).stem().string(), {pred, gt}});
    } else {
        for (const auto& p : sorted_files(pred, ".ptch")) {
            const fs::path g = fs::path(gt) / p.filename();
            if (!fs::is_regular_file(g)) throw CliError("missing ground-truth saliency " + g.string());
            pairs.push_back({p.stem().string(), {p, g}});
        }
        if (pairs.empty()) throw CliError("no .ptch files in " + pred);
    }
    const bool csv = format == "csv";
    std::printf(csv ? "scan,cc,sim,kld\n" : "%-12s %10s %10s %10s\n", "scan", "cc", "sim", "kld");
    double sum_cc = 0, sum_sim = 0, sum_kld = 0;
    for (const auto& [name, files] : pairs) {
        Array p = read_channel(files.first);
        Array g = read_channel(files.second);
        if (sod_array_size(p.get()) != sod_array_size(g.get())) {
            throw CliError(files.first.string() + ": " + std::to_string(sod_array_size(p.get())) +
                           " values but ground truth has " + std::to_string(sod_array_size(g.get())));
        }
        sod_saliency_scores s;
        check(sod_saliency_scores_compute(sod_array_data(p.get()), nullptr, sod_array_data(g.get()), nullptr,
                                          sod_array_size(p.get()), &s),
              files.first.string());
        print_scores(csv, name, s.cc, s.sim, s.kld);
        sum_cc += s.cc;
        sum_sim += s.sim;
        sum_kld += s.kld;
    }
    const double n = static_cast<double>(pairs.size());
    print_scores(csv, "mean", sum_cc / n, sum_sim / n, sum_kld / n);
}

// ---- plot

void cmd_plot(const std::vector<std::string>& trajs, std::vector<std::string> names, const std::string& gt,
              const std::string& title, const std::string& out) {
    std::vector<Traj> owned;
    std::vector<const sod_trajectory*> views;
    std::vector<std::string> labels;
    if (!gt.empty()) {
        owned.push_back(read_traj(gt));
        labels.push_back("ground truth");
    }
    if (!names.empty() && names.size() != trajs.size()) {
        throw CliError("got " + std::to_string(names.size()) + " names for " + std::to_string(trajs.size()) +
                       " trajectories");
    }
    for (size_t i = 0; i < trajs.size(); ++i) {
        owned.push_back(read_traj(trajs[i]));
        labels.push_back(names.empty() ? fs::path(trajs[i]).stem().string() : names[i]);
    }
    if (owned.empty()) throw CliError("nothing to plot");
    std::vector<const char*> cnames;
    for (size_t i = 0; i < owned.size(); ++i) {
        views.push_back(owned[i].get());
        cnames.push_back(labels[i].c_str());
    }
    check(sod_plot_svg(views.data(), cnames.data(), views.size(), title.c_str(), out.c_str()));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"salodom: saliency/semantics-weighted LiDAR odometry toolkit"};
    app.set_version_flag("--version", std::string(sod_version()));
    app.require_subcommand(1);

    TransferArgs targs;
    auto* transfer = app.add_subcommand("transfer", "project image saliency onto LiDAR points");
    transfer->add_option("--calib", targs.calib, "KITTI calib.txt")->required();
    transfer->add_option("--camera", targs.camera_key, "projection matrix key in calib.txt");
    transfer->add_option("--scans", targs.scans, "scan file or directory of .bin scans")->required();
    transfer->add_option("--images", targs.images,
                         "saliency PGM (file mode) or directory of <stem>.pgm; repeat to average annotators")
        ->required();
    transfer->add_option("--out", targs.out, "output .ptch file or directory")->required();
    transfer->add_flag("--raw", targs.raw, "skip min-max normalization");

    OdomArgs oargs;
    auto* odom = app.add_subcommand("odom", "frame-to-frame odometry over a KITTI-layout sequence");
    odom->add_option("--sequence", oargs.sequence, "sequence root (velodyne/, labels/, saliency/)")->required();
    odom->add_option("--out", oargs.out, "output directory")->required();
    odom->add_option("--config", oargs.config_file, "key=value config file");
    odom->add_option("--weighting", oargs.weighting, "none|saliency|semantic|both");
    odom->add_option("--lambda", oargs.lambda, "point-to-plane weight")->check(CLI::PositiveNumber);
    odom->add_option("--max-iters", oargs.max_iters, "iterations per pair")->check(CLI::PositiveNumber);
    odom->add_option("--tol", oargs.tol, "update-norm convergence threshold")->check(CLI::PositiveNumber);
    odom->add_option("--huber", oargs.huber, "Huber threshold in meters, 0 disables")->check(CLI::NonNegativeNumber);
    odom->add_option("--max-corr-dist", oargs.max_corr_dist, "correspondence gate in meters")
        ->check(CLI::PositiveNumber);
    odom->add_option("--stride", oargs.stride, "use every n-th source point")->check(CLI::PositiveNumber);
    odom->add_flag("--hard-mask", oargs.hard_mask, "drop pairs with a dynamic endpoint");
    odom->add_flag("--parallel", oargs.parallel, "solve pairs concurrently, identity initialization");
    odom->add_option("--threads", oargs.threads, "workers for --parallel (default: hardware)");
    odom->add_option("--seed", oargs.seed, "recorded in the manifest; the pipeline draws no random numbers");
    odom->add_option("--frames", oargs.frames, "use only the first N scans");
    odom->add_option("--mapping", oargs.mapping, "label mapping file (name id dynamic|static|ignore)");
    odom->add_option("--height", oargs.height, "range image rows")->check(CLI::PositiveNumber);
    odom->add_option("--width", oargs.width, "range image columns")->check(CLI::PositiveNumber);
    odom->add_option("--fov-up", oargs.fov_up_deg, "upper vertical field of view in degrees");
    odom->add_option("--fov-down", oargs.fov_down_deg, "lower vertical field of view in degrees");
    odom->add_flag("--no-labels", oargs.no_labels, "ignore labels/ even if present");
    odom->add_flag("--no-saliency", oargs.no_saliency, "ignore saliency/ even if present");

    std::string est, gt, format = "text", sequence, eval_out;
    auto* eval_odom = app.add_subcommand("eval-odom", "KITTI relative translation/rotation errors");
    eval_odom->add_option("--est", est, "estimated poses")->required();
    eval_odom->add_option("--gt", gt, "ground-truth poses")->required();
    eval_odom->add_option("--format", format, "text|csv");
    eval_odom->add_option("--sequence", sequence, "sequence name for the report");
    eval_odom->add_option("--out", eval_out, "write the report here instead of stdout");

    std::string pred, sal_gt, sal_format = "text";
    auto* eval_sal = app.add_subcommand("eval-sal", "CC / SIM / KLD per scan and mean");
    eval_sal->add_option("--pred", pred, "predicted .ptch file or directory")->required();
    eval_sal->add_option("--gt", sal_gt, "ground-truth .ptch file or directory")->required();
    eval_sal->add_option("--format", sal_format, "text|csv");

    std::vector<std::string> plot_trajs, plot_names;
    std::string plot_gt, plot_title, plot_out;
    auto* plot = app.add_subcommand("plot", "x-z trajectory overlay as SVG");
    plot->add_option("--traj", plot_trajs, "pose file; repeatable");
    plot->add_option("--name", plot_names, "legend name per --traj");
    plot->add_option("--gt", plot_gt, "ground-truth pose file, drawn first");
    plot->add_option("--title", plot_title, "plot title");
    plot->add_option("--out", plot_out, "output SVG")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*transfer) {
            cmd_transfer(targs);
        } else if (*odom) {
            cmd_odom(oargs);
        } else if (*eval_odom) {
            cmd_eval_odom(est, gt, format, sequence, eval_out);
        } else if (*eval_sal) {
            cmd_eval_sal(pred, sal_gt, sal_format);
        } else if (*plot) {
            cmd_plot(plot_trajs, plot_names, plot_gt, plot_title, plot_out);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "salodom: %s\n", e.what());
        return 1;
    }
    return 0;
}
