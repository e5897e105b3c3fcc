#ifndef OCLREID_CORE_HPP
#define OCLREID_CORE_HPP

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "oclreid/errors.hpp"

namespace oclreid {

// Fixed ten-part body scheme: {front, back} x {head, torso, legs, feet, whole}.
struct PartScheme {
    static constexpr int kNumParts = 10;

    static const std::array<std::string, kNumParts>& names();
    static int count() { return kNumParts; }

    // Indices 0..4 are the front half, 5..9 the back half.
    static bool is_front(int part) { return part < 5; }
};

struct VisibilityMask {
    std::array<std::uint8_t, PartScheme::kNumParts> bits{};

    int visible_count() const {
        int n = 0;
        for (auto b : bits) n += b;
        return n;
    }
    bool any() const { return visible_count() > 0; }

    static VisibilityMask all_visible() {
        VisibilityMask m;
        m.bits.fill(1);
        return m;
    }

    bool operator==(const VisibilityMask&) const = default;
};

struct BBox {
    double cx = 0.0;
    double cy = 0.0;
    double w = 1.0;
    double h = 1.0;
};

// One tracked person in one frame.  `raw` is the synthetic stand-in for the
// image patch: one descriptor row per body part, zero for invisible parts.
struct Observation {
    long frame = 0;
    int track_id = 0;
    int label = 0; // 1 = target
    BBox bbox;
    VisibilityMask vis;
    Eigen::MatrixXd raw; // N x D_raw

    // Enforces the invisible-row-is-zero invariant.
    static Observation make(long frame, int track_id, int label, BBox bbox,
                            VisibilityMask vis, Eigen::MatrixXd raw);
};

// N x C embedding matrix with its visibility mask.
struct PartFeatures {
    Eigen::MatrixXd F; // N x C
    VisibilityMask vis;
};

// Average L2 distance over parts visible in both inputs.  Equals the plain
// 1/N average when all parts are visible.
double part_distance(const PartFeatures& a, const PartFeatures& b);

double bbox_center_distance(const BBox& a, const BBox& b);

// Line-delimited observation record:
//   frame track_id label cx cy w h v0..v9 raw[0][0]..raw[N-1][D-1]
// Values round-trip exactly (17 significant digits).
std::string observation_to_record(const Observation& obs);
Observation observation_from_record(const std::string& line, int d_raw);

void write_observation_records(std::ostream& out,
                               const std::vector<Observation>& observations);
std::vector<Observation> read_observation_records(std::istream& in, int d_raw);

} // namespace oclreid

#endif
