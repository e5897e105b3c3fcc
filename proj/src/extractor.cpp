#include "oclreid/extractor.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "oclreid/errors.hpp"

namespace oclreid {

ExtractorParams ExtractorParams::zeros(const ModelDims& dims) {
    ExtractorParams p;
    p.dims = dims;
    p.W1 = Eigen::MatrixXd::Zero(dims.d_raw, dims.hidden);
    p.b1 = Eigen::VectorXd::Zero(dims.hidden);
    p.W2 = Eigen::MatrixXd::Zero(dims.hidden, dims.feat);
    p.b2 = Eigen::VectorXd::Zero(dims.feat);
    p.part_embed = Eigen::MatrixXd::Zero(dims.parts, dims.hidden);
    p.Hg = Eigen::MatrixXd::Zero(dims.feat, 2);
    p.bg.setZero();
    p.Hc = Eigen::MatrixXd::Zero(dims.feat * dims.parts, 2);
    p.bc.setZero();
    return p;
}

namespace {

void fill_gauss(Eigen::MatrixXd& m, Rng& rng, double scale) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = scale * rng.gauss();
}

void fill_gauss(Eigen::VectorXd& v, Rng& rng, double scale) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = scale * rng.gauss();
}

} // namespace

ExtractorParams ExtractorParams::random_init(const ModelDims& dims, Rng& rng,
                                             double scale) {
    ExtractorParams p = zeros(dims);
    fill_gauss(p.W1, rng, scale);
    fill_gauss(p.b1, rng, scale);
    fill_gauss(p.W2, rng, scale);
    fill_gauss(p.b2, rng, scale);
    fill_gauss(p.part_embed, rng, scale);
    fill_gauss(p.Hg, rng, scale);
    p.bg = Eigen::Vector2d(scale * rng.gauss(), scale * rng.gauss());
    fill_gauss(p.Hc, rng, scale);
    p.bc = Eigen::Vector2d(scale * rng.gauss(), scale * rng.gauss());
    return p;
}

bool ExtractorParams::same_values(const ExtractorParams& o) const {
    return dims == o.dims && W1 == o.W1 && b1 == o.b1 && W2 == o.W2 &&
           b2 == o.b2 && part_embed == o.part_embed && Hg == o.Hg &&
           bg == o.bg && Hc == o.Hc && bc == o.bc;
}

ExtractorGradients ExtractorGradients::zeros(const ModelDims& dims) {
    ExtractorGradients g;
    g.W1 = Eigen::MatrixXd::Zero(dims.d_raw, dims.hidden);
    g.b1 = Eigen::VectorXd::Zero(dims.hidden);
    g.W2 = Eigen::MatrixXd::Zero(dims.hidden, dims.feat);
    g.b2 = Eigen::VectorXd::Zero(dims.feat);
    g.part_embed = Eigen::MatrixXd::Zero(dims.parts, dims.hidden);
    g.Hg = Eigen::MatrixXd::Zero(dims.feat, 2);
    g.bg.setZero();
    g.Hc = Eigen::MatrixXd::Zero(dims.feat * dims.parts, 2);
    g.bc.setZero();
    return g;
}

namespace {

struct SampleCache {
    const Observation* obs = nullptr;
    Eigen::MatrixXd z; // N x H, pre-activation, zero rows for invisible parts
    Eigen::MatrixXd a; // N x H, relu(z)
    PartFeatures feat;
    Eigen::VectorXd pooled; // C
    Eigen::VectorXd concat; // C*N
    Eigen::Vector2d logits_g, logits_c;
    Eigen::Vector2d soft_g, soft_c;
    double ce_g = 0.0;
    double ce_c = 0.0;
    int vis_count = 0;
};

Eigen::Vector2d softmax2(const Eigen::Vector2d& l) {
    const double m = l.maxCoeff();
    Eigen::Vector2d e((l(0) - m), (l(1) - m));
    e = e.array().exp();
    return e / e.sum();
}

double cross_entropy2(const Eigen::Vector2d& l, int y) {
    const double m = l.maxCoeff();
    const double lse = m + std::log(std::exp(l(0) - m) + std::exp(l(1) - m));
    return lse - l(y);
}

SampleCache run_sample(const ExtractorParams& p, const Observation& obs) {
    SampleCache c;
    c.obs = &obs;
    const int N = p.dims.parts;
    c.z = Eigen::MatrixXd::Zero(N, p.dims.hidden);
    c.a = Eigen::MatrixXd::Zero(N, p.dims.hidden);
    c.feat.F = Eigen::MatrixXd::Zero(N, p.dims.feat);
    c.feat.vis = obs.vis;
    for (int k = 0; k < N; ++k) {
        if (!obs.vis.bits[static_cast<size_t>(k)]) continue;
        c.z.row(k) = (p.W1.transpose() * obs.raw.row(k).transpose() + p.b1 +
                      p.part_embed.row(k).transpose())
                         .transpose();
        c.a.row(k) = c.z.row(k).cwiseMax(0.0);
        c.feat.F.row(k) =
            (p.W2.transpose() * c.a.row(k).transpose() + p.b2).transpose();
        ++c.vis_count;
    }
    if (!c.z.allFinite()) throw NumericError("non-finite value in layer 1");
    if (!c.feat.F.allFinite()) throw NumericError("non-finite value in layer 2");
    if (c.vis_count == 0)
        throw ContractViolationError("sample with no visible part");
    c.pooled = Eigen::VectorXd::Zero(p.dims.feat);
    for (int k = 0; k < N; ++k)
        if (obs.vis.bits[static_cast<size_t>(k)])
            c.pooled += c.feat.F.row(k).transpose();
    c.pooled /= c.vis_count;
    c.concat = Eigen::VectorXd::Zero(p.dims.feat * N);
    for (int k = 0; k < N; ++k)
        c.concat.segment(k * p.dims.feat, p.dims.feat) =
            c.feat.F.row(k).transpose();
    c.logits_g = p.Hg.transpose() * c.pooled + p.bg;
    c.logits_c = p.Hc.transpose() * c.concat + p.bc;
    if (!c.logits_g.allFinite() || !c.logits_c.allFinite())
        throw NumericError("non-finite value in identity heads");
    c.soft_g = softmax2(c.logits_g);
    c.soft_c = softmax2(c.logits_c);
    c.ce_g = cross_entropy2(c.logits_g, obs.label);
    c.ce_c = cross_entropy2(c.logits_c, obs.label);
    return c;
}

} // namespace

PartFeatures forward(const ExtractorParams& p, const Observation& obs) {
    if (obs.raw.rows() != p.dims.parts || obs.raw.cols() != p.dims.d_raw)
        throw ConfigError("forward: observation shape mismatch");
    const int N = p.dims.parts;
    PartFeatures out;
    out.F = Eigen::MatrixXd::Zero(N, p.dims.feat);
    out.vis = obs.vis;
    for (int k = 0; k < N; ++k) {
        if (!obs.vis.bits[static_cast<size_t>(k)]) continue;
        Eigen::VectorXd z = p.W1.transpose() * obs.raw.row(k).transpose() +
                            p.b1 + p.part_embed.row(k).transpose();
        if (!z.allFinite()) throw NumericError("non-finite value in layer 1");
        out.F.row(k) =
            (p.W2.transpose() * z.cwiseMax(0.0) + p.b2).transpose();
    }
    if (!out.F.allFinite()) throw NumericError("non-finite value in layer 2");
    return out;
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> heads(const ExtractorParams& p,
                                                  const PartFeatures& F) {
    const int N = p.dims.parts;
    int vis = 0;
    Eigen::VectorXd pooled = Eigen::VectorXd::Zero(p.dims.feat);
    Eigen::VectorXd concat = Eigen::VectorXd::Zero(p.dims.feat * N);
    for (int k = 0; k < N; ++k) {
        concat.segment(k * p.dims.feat, p.dims.feat) = F.F.row(k).transpose();
        if (F.vis.bits[static_cast<size_t>(k)]) {
            pooled += F.F.row(k).transpose();
            ++vis;
        }
    }
    if (vis == 0) throw ContractViolationError("heads: no visible part");
    pooled /= vis;
    return {p.Hg.transpose() * pooled + p.bg, p.Hc.transpose() * concat + p.bc};
}

LossReport mixed_loss(const ExtractorParams& params, const TrainBatch& batch,
                      double margin) {
    return mixed_loss_with_grad(params, batch, margin, nullptr);
}

LossReport mixed_loss_with_grad(const ExtractorParams& p,
                                const TrainBatch& batch, double margin,
                                ExtractorGradients* grad) {
    const int S = static_cast<int>(batch.size());
    int positives = 0, negatives = 0;
    for (const auto& s : batch.samples) (s.label == 1 ? positives : negatives)++;
    if (positives == 0 || negatives == 0)
        throw MiningImpossibleError(
            "mixed_loss needs at least one positive and one negative");

    std::vector<SampleCache> cache;
    cache.reserve(batch.size());
    for (const auto& s : batch.samples) cache.push_back(run_sample(p, s));

    LossReport report;
    report.per_sample.assign(batch.size(), 0.0);
    for (int i = 0; i < S; ++i) {
        report.ce_g += cache[i].ce_g;
        report.ce_c += cache[i].ce_c;
    }
    report.ce_g /= S;
    report.ce_c /= S;

    // Pairwise average part distances; NaN marks pairs with no shared part.
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(S, S, nan);
    for (int i = 0; i < S; ++i)
        for (int j = i + 1; j < S; ++j) {
            try {
                dist(i, j) = dist(j, i) =
                    part_distance(cache[i].feat, cache[j].feat);
            } catch (const DistanceUndefinedError&) {
            }
        }

    struct AnchorPick {
        int anchor, pos, neg;
        double hinge;
    };
    std::vector<AnchorPick> picks;
    for (int i = 0; i < S; ++i) {
        int jp = -1, jn = -1;
        double d_ap = -1.0, d_an = 0.0;
        for (int j = 0; j < S; ++j) {
            if (j == i || std::isnan(dist(i, j))) continue;
            if (batch.samples[j].label == batch.samples[i].label) {
                if (dist(i, j) > d_ap) {
                    d_ap = dist(i, j);
                    jp = j;
                }
            } else if (jn < 0 || dist(i, j) < d_an) {
                d_an = dist(i, j);
                jn = j;
            }
        }
        if (jp < 0 || jn < 0) continue; // anchor not mineable
        const double hinge = std::max(0.0, d_ap - d_an + margin);
        picks.push_back({i, jp, jn, hinge});
        report.triplet += hinge;
        report.per_sample[i] += hinge;
    }
    if (!picks.empty()) report.triplet /= static_cast<double>(picks.size());

    for (int i = 0; i < S; ++i)
        report.per_sample[i] += cache[i].ce_g + cache[i].ce_c;
    report.total = report.ce_g + report.ce_c + report.triplet;

    if (grad != nullptr) {
        *grad = ExtractorGradients::zeros(p.dims);
        std::vector<Eigen::MatrixXd> dF(
            batch.size(), Eigen::MatrixXd::Zero(p.dims.parts, p.dims.feat));

        // cross-entropy heads
        for (int i = 0; i < S; ++i) {
            const SampleCache& c = cache[i];
            const int y = c.obs->label;
            Eigen::Vector2d dlg = c.soft_g / S;
            dlg(y) -= 1.0 / S;
            grad->Hg += c.pooled * dlg.transpose();
            grad->bg += dlg;
            const Eigen::VectorXd dpool = p.Hg * dlg;
            Eigen::Vector2d dlc = c.soft_c / S;
            dlc(y) -= 1.0 / S;
            grad->Hc += c.concat * dlc.transpose();
            grad->bc += dlc;
            const Eigen::VectorXd dconcat = p.Hc * dlc;
            for (int k = 0; k < p.dims.parts; ++k) {
                if (!c.obs->vis.bits[static_cast<size_t>(k)]) continue;
                dF[i].row(k) += (dpool / c.vis_count).transpose();
                dF[i].row(k) +=
                    dconcat.segment(k * p.dims.feat, p.dims.feat).transpose();
            }
        }

        // triplet hinge through the selected hardest pairs
        const double anchor_w =
            picks.empty() ? 0.0 : 1.0 / static_cast<double>(picks.size());
        auto add_dist_grad = [&](int i, int j, double w) {
            int shared = 0;
            for (int k = 0; k < p.dims.parts; ++k)
                if (cache[i].feat.vis.bits[static_cast<size_t>(k)] &&
                    cache[j].feat.vis.bits[static_cast<size_t>(k)])
                    ++shared;
            for (int k = 0; k < p.dims.parts; ++k) {
                if (!cache[i].feat.vis.bits[static_cast<size_t>(k)] ||
                    !cache[j].feat.vis.bits[static_cast<size_t>(k)])
                    continue;
                const Eigen::RowVectorXd diff =
                    cache[i].feat.F.row(k) - cache[j].feat.F.row(k);
                const double nrm = diff.norm();
                if (nrm <= 0.0) continue;
                const Eigen::RowVectorXd g = (w / (shared * nrm)) * diff;
                dF[i].row(k) += g;
                dF[j].row(k) -= g;
            }
        };
        for (const auto& pick : picks) {
            if (pick.hinge <= 0.0) continue;
            add_dist_grad(pick.anchor, pick.pos, anchor_w);
            add_dist_grad(pick.anchor, pick.neg, -anchor_w);
        }

        // backbone
        for (int i = 0; i < S; ++i) {
            const SampleCache& c = cache[i];
            for (int k = 0; k < p.dims.parts; ++k) {
                if (!c.obs->vis.bits[static_cast<size_t>(k)]) continue;
                const Eigen::VectorXd dFk = dF[i].row(k).transpose();
                grad->W2 += c.a.row(k).transpose() * dFk.transpose();
                grad->b2 += dFk;
                Eigen::VectorXd dz = p.W2 * dFk;
                for (Eigen::Index h = 0; h < dz.size(); ++h)
                    if (c.z(k, h) <= 0.0) dz(h) = 0.0;
                grad->W1 += c.obs->raw.row(k).transpose() * dz.transpose();
                grad->b1 += dz;
                grad->part_embed.row(k) += dz.transpose();
            }
        }
    }
    return report;
}

std::pair<ExtractorParams, LossReport> sgd_step(const ExtractorParams& params,
                                                const TrainBatch& batch,
                                                double lr, double margin) {
    if (lr < 0.0) throw ConfigError("sgd_step: negative learning rate");
    ExtractorGradients g = ExtractorGradients::zeros(params.dims);
    LossReport report = mixed_loss_with_grad(params, batch, margin, &g);
    ExtractorParams next = params;
    next.W1 -= lr * g.W1;
    next.b1 -= lr * g.b1;
    next.W2 -= lr * g.W2;
    next.b2 -= lr * g.b2;
    next.part_embed -= lr * g.part_embed;
    next.Hg -= lr * g.Hg;
    next.bg -= lr * g.bg;
    next.Hc -= lr * g.Hc;
    next.bc -= lr * g.bc;
    next.version = params.version + 1;
    return {std::move(next), std::move(report)};
}

ExtractorParams snapshot(const ExtractorParams& params) { return params; }

namespace {

void write_block(std::ostream& out, const char* name,
                 const Eigen::MatrixXd& m) {
    out << name;
    char buf[40];
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), " %.17g", m(i, j));
            out << buf;
        }
    out << '\n';
}

void read_block(std::istream& in, const char* name, Eigen::MatrixXd& m) {
    std::string tag;
    if (!(in >> tag) || tag != name)
        throw IoError(std::string("checkpoint: expected block ") + name);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (!(in >> m(i, j)))
                throw IoError(std::string("checkpoint: truncated block ") + name);
}

} // namespace

void save_checkpoint(std::ostream& out, const ExtractorParams& p) {
    out << "oclreid-extractor v1\n"
        << p.dims.d_raw << ' ' << p.dims.hidden << ' ' << p.dims.feat << ' '
        << p.dims.parts << ' ' << p.version << '\n';
    write_block(out, "W1", p.W1);
    write_block(out, "b1", p.b1);
    write_block(out, "W2", p.W2);
    write_block(out, "b2", p.b2);
    write_block(out, "part_embed", p.part_embed);
    write_block(out, "Hg", p.Hg);
    write_block(out, "bg", p.bg);
    write_block(out, "Hc", p.Hc);
    write_block(out, "bc", p.bc);
}

ExtractorParams load_checkpoint(std::istream& in) {
    std::string word, ver;
    if (!(in >> word >> ver) || word != "oclreid-extractor" || ver != "v1")
        throw IoError("checkpoint: bad header");
    ModelDims dims;
    std::uint64_t version;
    if (!(in >> dims.d_raw >> dims.hidden >> dims.feat >> dims.parts >> version))
        throw IoError("checkpoint: bad dims line");
    ExtractorParams p = ExtractorParams::zeros(dims);
    p.version = version;
    read_block(in, "W1", p.W1);
    Eigen::MatrixXd tmp;
    auto read_vec = [&](const char* name, Eigen::VectorXd& v) {
        tmp.resize(v.size(), 1);
        read_block(in, name, tmp);
        v = tmp.col(0);
    };
    read_vec("b1", p.b1);
    read_block(in, "W2", p.W2);
    read_vec("b2", p.b2);
    read_block(in, "part_embed", p.part_embed);
    read_block(in, "Hg", p.Hg);
    Eigen::VectorXd v2(2);
    read_vec("bg", v2);
    p.bg = v2;
    read_block(in, "Hc", p.Hc);
    read_vec("bc", v2);
    p.bc = v2;
    return p;
}

} // namespace oclreid
