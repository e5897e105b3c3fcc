#include "oclreid/core.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace oclreid {

const std::array<std::string, PartScheme::kNumParts>& PartScheme::names() {
    static const std::array<std::string, kNumParts> kNames = {
        "front-head", "front-torso", "front-legs", "front-feet", "front-whole",
        "back-head",  "back-torso",  "back-legs",  "back-feet",  "back-whole"};
    return kNames;
}

Observation Observation::make(long frame, int track_id, int label, BBox bbox,
                              VisibilityMask vis, Eigen::MatrixXd raw) {
    if (raw.rows() != PartScheme::kNumParts)
        throw ConfigError("observation raw must have one row per part");
    if (bbox.w <= 0.0 || bbox.h <= 0.0)
        throw ConfigError("bbox must have positive extent");
    if (!raw.allFinite() || !std::isfinite(bbox.cx) || !std::isfinite(bbox.cy))
        throw NumericError("non-finite observation");
    for (int k = 0; k < PartScheme::kNumParts; ++k)
        if (!vis.bits[k]) raw.row(k).setZero();
    Observation obs;
    obs.frame = frame;
    obs.track_id = track_id;
    obs.label = label;
    obs.bbox = bbox;
    obs.vis = vis;
    obs.raw = std::move(raw);
    return obs;
}

double part_distance(const PartFeatures& a, const PartFeatures& b) {
    if (a.F.rows() != b.F.rows() || a.F.cols() != b.F.cols())
        throw ConfigError("part_distance: shape mismatch");
    double sum = 0.0;
    int shared = 0;
    for (int k = 0; k < a.F.rows(); ++k) {
        if (a.vis.bits[static_cast<size_t>(k)] &&
            b.vis.bits[static_cast<size_t>(k)]) {
            sum += (a.F.row(k) - b.F.row(k)).norm();
            ++shared;
        }
    }
    if (shared == 0)
        throw DistanceUndefinedError("part_distance: no mutually visible part");
    return sum / shared;
}

double bbox_center_distance(const BBox& a, const BBox& b) {
    return std::hypot(a.cx - b.cx, a.cy - b.cy);
}

namespace {

void append_num(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

} // namespace

std::string observation_to_record(const Observation& obs) {
    std::string out;
    out.reserve(64 + static_cast<size_t>(obs.raw.size()) * 24);
    out += std::to_string(obs.frame);
    out += ' ';
    out += std::to_string(obs.track_id);
    out += ' ';
    out += std::to_string(obs.label);
    for (double v : {obs.bbox.cx, obs.bbox.cy, obs.bbox.w, obs.bbox.h}) {
        out += ' ';
        append_num(out, v);
    }
    for (auto b : obs.vis.bits) {
        out += ' ';
        out += (b ? '1' : '0');
    }
    for (int k = 0; k < obs.raw.rows(); ++k)
        for (int d = 0; d < obs.raw.cols(); ++d) {
            out += ' ';
            append_num(out, obs.raw(k, d));
        }
    return out;
}

Observation observation_from_record(const std::string& line, int d_raw) {
    std::istringstream in(line);
    long frame;
    int track_id, label;
    BBox bbox;
    if (!(in >> frame >> track_id >> label >> bbox.cx >> bbox.cy >> bbox.w >>
          bbox.h))
        throw IoError("malformed observation record");
    VisibilityMask vis;
    for (auto& b : vis.bits) {
        int v;
        if (!(in >> v)) throw IoError("malformed visibility bits");
        b = static_cast<std::uint8_t>(v != 0);
    }
    Eigen::MatrixXd raw(PartScheme::kNumParts, d_raw);
    for (int k = 0; k < raw.rows(); ++k)
        for (int d = 0; d < d_raw; ++d)
            if (!(in >> raw(k, d))) throw IoError("malformed raw descriptor");
    return Observation::make(frame, track_id, label, bbox, vis, std::move(raw));
}

void write_observation_records(std::ostream& out,
                               const std::vector<Observation>& observations) {
    for (const auto& obs : observations) out << observation_to_record(obs) << '\n';
}

std::vector<Observation> read_observation_records(std::istream& in, int d_raw) {
    std::vector<Observation> result;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        result.push_back(observation_from_record(line, d_raw));
    }
    return result;
}

} // namespace oclreid
