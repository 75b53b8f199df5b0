#include "salodom/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "salodom/error.hpp"

namespace salodom::io {

namespace {

std::uint32_t load_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t load_u64(const std::uint8_t* p) {
    return static_cast<std::uint64_t>(load_u32(p)) | (static_cast<std::uint64_t>(load_u32(p + 4)) << 32);
}

float load_f32(const std::uint8_t* p) { return std::bit_cast<float>(load_u32(p)); }

void store_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void store_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    store_u32(out, static_cast<std::uint32_t>(v));
    store_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void store_f32(std::vector<std::uint8_t>& out, float v) { store_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

bool parse_double(std::string_view token, double& out) {
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(out);
}

template <typename Int>
bool parse_int(std::string_view token, Int& out) {
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc() && ptr == token.data() + token.size();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(line);
    }
    return out;
}

std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    return hash == std::string::npos ? line : line.substr(0, hash);
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace

// ---------------------------------------------------------------------------
// Files

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail(ErrorCode::Io, "read error on " + path.string());
    return bytes;
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::Io, "write error on " + path.string());
}

std::string read_text(const fs::path& path) {
    const auto bytes = read_bytes(path);
    return {bytes.begin(), bytes.end()};
}

void write_text(const fs::path& path, const std::string& text) {
    write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

namespace {

template <typename Fn>
auto with_path(const fs::path& path, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// KITTI scans

PointCloud parse_kitti_scan(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % 16 != 0) {
        fail(ErrorCode::Format, "malformed scan: size " + std::to_string(bytes.size()) +
                                    " is not a multiple of 16 (trailing bytes at offset " +
                                    std::to_string(bytes.size() - bytes.size() % 16) + ")");
    }
    const std::size_t n = bytes.size() / 16;
    PointCloud cloud;
    cloud.positions.resize(n);
    cloud.intensity.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* p = bytes.data() + 16 * i;
        cloud.positions[i] = Vec3(load_f32(p), load_f32(p + 4), load_f32(p + 8));
        cloud.intensity[i] = load_f32(p + 12);
        if (!cloud.positions[i].allFinite() || !std::isfinite(cloud.intensity[i])) {
            fail(ErrorCode::Format, "invalid point: non-finite value at offset " + std::to_string(16 * i));
        }
    }
    return cloud;
}

PointCloud read_kitti_scan(const fs::path& path) {
    return with_path(path, [&] { return parse_kitti_scan(read_bytes(path)); });
}

std::vector<std::uint8_t> encode_kitti_scan(const PointCloud& cloud) {
    cloud.validate();
    std::vector<std::uint8_t> out;
    out.reserve(16 * cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud.positions[i];
        store_f32(out, static_cast<float>(p.x()));
        store_f32(out, static_cast<float>(p.y()));
        store_f32(out, static_cast<float>(p.z()));
        store_f32(out, cloud.intensity.empty() ? 0.0f : static_cast<float>(cloud.intensity[i]));
    }
    return out;
}

void write_kitti_scan(const PointCloud& cloud, const fs::path& path) {
    with_path(path, [&] { write_bytes(path, encode_kitti_scan(cloud)); });
}

// ---------------------------------------------------------------------------
// Poses

namespace {
constexpr double kRotationTolerance = 1e-3;
}

Trajectory parse_poses(const std::string& text) {
    Trajectory traj;
    const auto lines = lines_of(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const auto tokens = split_ws(lines[ln]);
        if (tokens.empty()) continue;
        const std::string where = "line " + std::to_string(ln + 1);
        if (tokens.size() != 12) {
            fail(ErrorCode::Format, where + ": expected 12 values, got " + std::to_string(tokens.size()));
        }
        double m[12];
        for (int k = 0; k < 12; ++k) {
            if (!parse_double(tokens[static_cast<std::size_t>(k)], m[k])) {
                fail(ErrorCode::Format, where + ": bad number '" + std::string(tokens[static_cast<std::size_t>(k)]) + "'");
            }
        }
        Mat3 R;
        R << m[0], m[1], m[2], m[4], m[5], m[6], m[8], m[9], m[10];
        const double ortho = (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff();
        if (ortho > kRotationTolerance || R.determinant() <= 0.0) fail(ErrorCode::Format, where + ": invalid rotation");
        traj.poses.push_back(RigidTransform::from_matrix3x4(m));
    }
    return traj;
}

Trajectory read_poses(const fs::path& path) {
    return with_path(path, [&] { return parse_poses(read_text(path)); });
}

std::string format_poses(const Trajectory& traj) {
    std::string out;
    char buf[32];
    for (const auto& pose : traj.poses) {
        double m[12];
        pose.to_matrix3x4(m);
        for (int k = 0; k < 12; ++k) {
            std::snprintf(buf, sizeof buf, "%.8e", m[k] == 0.0 ? 0.0 : m[k]);
            out += buf;
            out += k == 11 ? '\n' : ' ';
        }
    }
    return out;
}

void write_poses(const Trajectory& traj, const fs::path& path) {
    with_path(path, [&] { write_text(path, format_poses(traj)); });
}

// ---------------------------------------------------------------------------
// Labels

std::vector<std::uint32_t> parse_label_words(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % 4 != 0) {
        fail(ErrorCode::Format, "malformed label file: size " + std::to_string(bytes.size()) +
                                    " is not a multiple of 4 (trailing bytes at offset " +
                                    std::to_string(bytes.size() - bytes.size() % 4) + ")");
    }
    std::vector<std::uint32_t> out(bytes.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = load_u32(bytes.data() + 4 * i);
    return out;
}

std::vector<std::uint32_t> read_label_words(const fs::path& path) {
    return with_path(path, [&] { return parse_label_words(read_bytes(path)); });
}

std::vector<std::uint8_t> encode_label_words(std::span<const std::uint32_t> words) {
    std::vector<std::uint8_t> out;
    out.reserve(4 * words.size());
    for (std::uint32_t w : words) store_u32(out, w);
    return out;
}

void write_label_words(std::span<const std::uint32_t> words, const fs::path& path) {
    with_path(path, [&] { write_bytes(path, encode_label_words(words)); });
}

SemanticMap read_labels(const fs::path& path, std::optional<std::size_t> expected_count) {
    return with_path(path, [&] {
        SemanticMap sem;
        sem.labels = parse_label_words(read_bytes(path));
        if (expected_count && sem.labels.size() != *expected_count) {
            fail(ErrorCode::Format, "label count " + std::to_string(sem.labels.size()) +
                                        " does not match scan point count " + std::to_string(*expected_count));
        }
        for (auto& l : sem.labels) l &= 0xFFFFu;
        return sem;
    });
}

BinarizationTable parse_label_table(const std::string& text) {
    BinarizationTable table;
    const auto lines = lines_of(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const std::string content = strip_comment(lines[ln]);
        const auto tokens = split_ws(content);
        if (tokens.empty()) continue;
        const std::string where = "line " + std::to_string(ln + 1);
        std::uint32_t id = 0;
        if (tokens.size() != 3 || !parse_int(tokens[1], id)) {
            fail(ErrorCode::Format, where + ": expected 'name id {dynamic|static|ignore}'");
        }
        try {
            table.entries[id] = LabelEntry{std::string(tokens[0]), parse_motion_class(std::string(tokens[2]))};
        } catch (const Error& e) {
            fail(ErrorCode::Format, where + ": " + e.what());
        }
    }
    if (table.entries.empty()) fail(ErrorCode::Format, "label table is empty");
    return table;
}

BinarizationTable read_label_table(const fs::path& path) {
    return with_path(path, [&] { return parse_label_table(read_text(path)); });
}

// ---------------------------------------------------------------------------
// Point channels

std::vector<double> parse_point_channel(std::span<const std::uint8_t> bytes, std::optional<std::size_t> expected_count) {
    if (bytes.size() < kChannelHeaderSize) {
        fail(ErrorCode::Format, "truncated channel header: " + std::to_string(bytes.size()) + " of " +
                                    std::to_string(kChannelHeaderSize) + " bytes at offset 0");
    }
    if (std::memcmp(bytes.data(), "PTCH", 4) != 0) fail(ErrorCode::Format, "bad channel magic at offset 0");
    const std::uint32_t version = load_u32(bytes.data() + 4);
    if (version != kChannelVersion) {
        fail(ErrorCode::Format, "unsupported channel version " + std::to_string(version) + " at offset 4");
    }
    const std::uint64_t count = load_u64(bytes.data() + 8);
    const std::uint64_t payload = bytes.size() - kChannelHeaderSize;
    if (count > payload / 4 || payload != 4 * count) {
        fail(ErrorCode::Format, "channel declares " + std::to_string(count) + " values but payload at offset " +
                                    std::to_string(kChannelHeaderSize) + " holds " + std::to_string(payload) +
                                    " bytes");
    }
    if (expected_count && count != *expected_count) {
        fail(ErrorCode::Format, "channel count " + std::to_string(count) + " does not match scan point count " +
                                    std::to_string(*expected_count));
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        const float v = load_f32(bytes.data() + kChannelHeaderSize + 4 * i);
        if (!std::isfinite(v)) {
            fail(ErrorCode::Format, "non-finite channel value at offset " + std::to_string(kChannelHeaderSize + 4 * i));
        }
        values[i] = v;
    }
    return values;
}

std::vector<double> read_point_channel(const fs::path& path, std::optional<std::size_t> expected_count) {
    return with_path(path, [&] { return parse_point_channel(read_bytes(path), expected_count); });
}

std::vector<std::uint8_t> encode_point_channel(std::span<const double> values) {
    std::vector<std::uint8_t> out;
    out.reserve(kChannelHeaderSize + 4 * values.size());
    out.insert(out.end(), {'P', 'T', 'C', 'H'});
    store_u32(out, kChannelVersion);
    store_u64(out, values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto v = static_cast<float>(values[i]);
        if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "non-finite channel value at index " + std::to_string(i));
        store_f32(out, v);
    }
    return out;
}

void write_point_channel(std::span<const double> values, const fs::path& path) {
    with_path(path, [&] { write_bytes(path, encode_point_channel(values)); });
}

// ---------------------------------------------------------------------------
// PGM

namespace {

// Reads one header token, skipping whitespace and '#' comments.
std::string pgm_token(std::span<const std::uint8_t> bytes, std::size_t& pos, std::size_t* token_start = nullptr) {
    for (;;) {
        while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
        if (pos < bytes.size() && bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            continue;
        }
        break;
    }
    const std::size_t start = pos;
    if (token_start) *token_start = start;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) ++pos;
    if (pos == start) fail(ErrorCode::Format, "truncated PGM header at offset " + std::to_string(start));
    return {bytes.begin() + static_cast<std::ptrdiff_t>(start), bytes.begin() + static_cast<std::ptrdiff_t>(pos)};
}

}  // namespace

GrayImage parse_pgm(std::span<const std::uint8_t> bytes) {
    std::size_t pos = 0;
    if (pgm_token(bytes, pos) != "P5") fail(ErrorCode::Format, "not a binary PGM (P5) at offset 0");
    int width = 0, height = 0, maxval = 0;
    std::size_t dims_at = pos;
    if (!parse_int(pgm_token(bytes, pos, &dims_at), width) || !parse_int(pgm_token(bytes, pos), height) || width <= 0 ||
        height <= 0) {
        fail(ErrorCode::Format, "bad PGM dimensions at offset " + std::to_string(dims_at));
    }
    std::size_t maxval_at = pos;
    if (!parse_int(pgm_token(bytes, pos, &maxval_at), maxval) || maxval != 255) {
        fail(ErrorCode::Format, "PGM maxval must be 255 (offset " + std::to_string(maxval_at) + ")");
    }
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
        fail(ErrorCode::Format, "truncated PGM header at offset " + std::to_string(pos));
    }
    ++pos;
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - pos != n) {
        fail(ErrorCode::Format, "PGM pixel data at offset " + std::to_string(pos) + " has " +
                                    std::to_string(bytes.size() - pos) + " bytes, expected " + std::to_string(n));
    }
    GrayImage img{width, height, std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) img.values[k] = bytes[pos + k] / 255.0;
    return img;
}

GrayImage read_pgm(const fs::path& path) {
    return with_path(path, [&] { return parse_pgm(read_bytes(path)); });
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
    image.validate();
    const std::string header =
        "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + image.values.size());
    for (double v : image.values) out.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
    return out;
}

void write_pgm(const GrayImage& image, const fs::path& path) {
    with_path(path, [&] { write_bytes(path, encode_pgm(image)); });
}

// ---------------------------------------------------------------------------
// Calibration

CameraModel parse_kitti_calib(const std::string& text, int image_width, int image_height,
                              const std::string& camera_key) {
    std::map<std::string, std::vector<double>> entries;
    const auto lines = lines_of(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const auto colon = lines[ln].find(':');
        if (colon == std::string::npos) continue;
        const std::string key = trim(std::string_view(lines[ln]).substr(0, colon));
        std::vector<double> values;
        for (auto tok : split_ws(std::string_view(lines[ln]).substr(colon + 1))) {
            double v = 0.0;
            if (!parse_double(tok, v)) {
                fail(ErrorCode::Format, "line " + std::to_string(ln + 1) + ": bad number '" + std::string(tok) + "'");
            }
            values.push_back(v);
        }
        entries[key] = std::move(values);
    }

    auto get12 = [&](std::initializer_list<const char*> keys) -> const std::vector<double>& {
        for (const char* k : keys) {
            const auto it = entries.find(k);
            if (it == entries.end()) continue;
            if (it->second.size() != 12) {
                fail(ErrorCode::Format, std::string("calibration entry ") + k + " needs 12 values");
            }
            return it->second;
        }
        fail(ErrorCode::Format, std::string("calibration is missing ") + *keys.begin());
    };
    const auto& P = get12({camera_key.c_str()});
    const auto& Tr = get12({"Tr", "Tr_velo_to_cam"});

    CameraModel cam;
    cam.fx = P[0];
    cam.fy = P[5];
    cam.cx = P[2];
    cam.cy = P[6];
    cam.image_width = image_width;
    cam.image_height = image_height;
    if (!(cam.fx > 0.0) || !(cam.fy > 0.0)) fail(ErrorCode::Format, "calibration has non-positive focal length");
    // P = K [I | b]; recover the rectified-camera offset b from the last column.
    const double bz = P[11];
    const double by = (P[7] - cam.cy * bz) / cam.fy;
    const double bx = (P[3] - cam.cx * bz - P[1] * by) / cam.fx;

    Mat3 R;
    R << Tr[0], Tr[1], Tr[2], Tr[4], Tr[5], Tr[6], Tr[8], Tr[9], Tr[10];
    if ((R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() > kRotationTolerance || R.determinant() <= 0.0) {
        fail(ErrorCode::Format, "calibration Tr is not a rotation");
    }
    const RigidTransform cam0_from_lidar(R, Vec3(Tr[3], Tr[7], Tr[11]));
    cam.cam_from_lidar = RigidTransform::from_translation(Vec3(bx, by, bz)) * cam0_from_lidar;
    cam.validate();
    return cam;
}

CameraModel read_kitti_calib(const fs::path& path, int image_width, int image_height, const std::string& camera_key) {
    return with_path(path, [&] { return parse_kitti_calib(read_text(path), image_width, image_height, camera_key); });
}

// ---------------------------------------------------------------------------
// Config

namespace {

double config_double(const std::string& key, const std::string& value) {
    double v = 0.0;
    if (!parse_double(value, v)) fail(ErrorCode::Format, "config key '" + key + "': bad number '" + value + "'");
    return v;
}

int config_int(const std::string& key, const std::string& value) {
    int v = 0;
    if (!parse_int(std::string_view(value), v)) {
        fail(ErrorCode::Format, "config key '" + key + "': bad integer '" + value + "'");
    }
    return v;
}

bool config_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "no") return false;
    fail(ErrorCode::Format, "config key '" + key + "': bad boolean '" + value + "'");
}

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

void apply_config_text(const std::string& text, OdometryConfig& odom, ProjectionParams& projection) {
    const auto lines = lines_of(text);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const std::string line = trim(strip_comment(lines[ln]));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(ErrorCode::Format, "line " + std::to_string(ln + 1) + ": expected key=value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key == "lambda") {
            odom.lambda = config_double(key, value);
        } else if (key == "max_iterations") {
            odom.max_iterations = config_int(key, value);
        } else if (key == "convergence_tol") {
            odom.convergence_tol = config_double(key, value);
        } else if (key == "max_corr_dist") {
            odom.max_corr_dist = config_double(key, value);
        } else if (key == "huber_delta") {
            odom.huber_delta = config_double(key, value);
        } else if (key == "weighting") {
            odom.weighting = parse_weighting_mode(value);
        } else if (key == "hard_mask") {
            odom.hard_mask = config_bool(key, value);
        } else if (key == "source_stride") {
            odom.source_stride = config_int(key, value);
        } else if (key == "height") {
            projection.height = config_int(key, value);
        } else if (key == "width") {
            projection.width = config_int(key, value);
        } else if (key == "fov_up_deg") {
            projection.fov_up = config_double(key, value) * kDegToRad;
        } else if (key == "fov_down_deg") {
            projection.fov_down = config_double(key, value) * kDegToRad;
        } else {
            fail(ErrorCode::Format, "line " + std::to_string(ln + 1) + ": unknown config key '" + key + "'");
        }
    }
}

void apply_config_file(const fs::path& path, OdometryConfig& odom, ProjectionParams& projection) {
    with_path(path, [&] { apply_config_text(read_text(path), odom, projection); });
}

std::string format_config(const OdometryConfig& odom, const ProjectionParams& projection) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "lambda=%.17g\nmax_iterations=%d\nconvergence_tol=%.17g\nmax_corr_dist=%.17g\nhuber_delta=%.17g\n"
                  "weighting=%s\nhard_mask=%d\nsource_stride=%d\nheight=%d\nwidth=%d\nfov_up_deg=%.17g\n"
                  "fov_down_deg=%.17g\n",
                  odom.lambda, odom.max_iterations, odom.convergence_tol, odom.max_corr_dist, odom.huber_delta,
                  weighting_mode_name(odom.weighting), odom.hard_mask ? 1 : 0, odom.source_stride, projection.height,
                  projection.width, projection.fov_up / kDegToRad, projection.fov_down / kDegToRad);
    return buf;
}

std::string format_trajectory_csv(const Trajectory& traj) {
    std::string out = "frame,x,y,z\n";
    char buf[128];
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const Vec3& t = traj.poses[i].translation();
        std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g\n", i, t.x(), t.y(), t.z());
        out += buf;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dataset layout

DatasetLayout DatasetLayout::kitti(const fs::path& sequence_root) {
    DatasetLayout l;
    l.root = sequence_root;
    l.scan_dir = sequence_root / "velodyne";
    l.label_dir = sequence_root / "labels";
    l.saliency_dir = sequence_root / "saliency";
    l.calib_file = sequence_root / "calib.txt";
    l.pose_file = sequence_root / "poses.txt";
    return l;
}

std::vector<FrameFiles> list_frames(const DatasetLayout& layout, bool with_labels, bool with_saliency) {
    if (!fs::is_directory(layout.scan_dir)) fail(ErrorCode::Io, "scan directory not found: " + layout.scan_dir.string());
    std::vector<FrameFiles> frames;
    for (const auto& entry : fs::directory_iterator(layout.scan_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".bin") continue;
        FrameFiles f;
        f.stem = entry.path().stem().string();
        f.scan = entry.path();
        frames.push_back(std::move(f));
    }
    std::sort(frames.begin(), frames.end(), [](const FrameFiles& a, const FrameFiles& b) {
        return a.scan.filename().string() < b.scan.filename().string();
    });
    for (auto& f : frames) {
        if (with_labels) {
            f.label = layout.label_dir / (f.stem + ".label");
            if (!fs::exists(f.label)) fail(ErrorCode::Io, "missing label file " + f.label.string());
        }
        if (with_saliency) {
            f.saliency = layout.saliency_dir / (f.stem + ".ptch");
            if (!fs::exists(f.saliency)) fail(ErrorCode::Io, "missing saliency file " + f.saliency.string());
        }
    }
    return frames;
}

}  // namespace salodom::io
