#include "vsg/resampler.hpp"

#include "json_util.hpp"
#include "rng.hpp"
#include "vsg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vsg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void ResamplerDims::validate() const {
    if (depth < 1 || n_queries < 1 || d_in < 1 || d_latent < 1 || d_hidden < 1 || d_out < 1) {
        throw Error(ErrorKind::InvalidParam, "resampler dimensions must be positive");
    }
}

std::vector<std::pair<std::string, MatrixXd*>> ResamplerParams::named() {
    std::vector<std::pair<std::string, MatrixXd*>> out;
    out.emplace_back("latents", &latents);
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const std::string p = "layers." + std::to_string(i) + ".";
        auto& l = layers[i];
        out.emplace_back(p + "norm_q", &l.norm_q);
        out.emplace_back(p + "norm_kv", &l.norm_kv);
        out.emplace_back(p + "wq", &l.wq);
        out.emplace_back(p + "wk", &l.wk);
        out.emplace_back(p + "wv", &l.wv);
        out.emplace_back(p + "wo", &l.wo);
        out.emplace_back(p + "norm_post", &l.norm_post);
        out.emplace_back(p + "w1", &l.w1);
        out.emplace_back(p + "w2", &l.w2);
    }
    out.emplace_back("proj_out", &proj_out);
    return out;
}

std::vector<std::pair<std::string, const MatrixXd*>> ResamplerParams::named() const {
    auto mutable_view = const_cast<ResamplerParams*>(this)->named();
    std::vector<std::pair<std::string, const MatrixXd*>> out;
    out.reserve(mutable_view.size());
    for (auto& [name, m] : mutable_view) {
        out.emplace_back(std::move(name), m);
    }
    return out;
}

std::size_t ResamplerParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, m] : named()) {
        n += static_cast<std::size_t>(m->size());
    }
    return n;
}

namespace {

struct Shape {
    Eigen::Index rows;
    Eigen::Index cols;
};

std::vector<Shape> expected_shapes(const ResamplerDims& d) {
    const Eigen::Index hidden = 4 * static_cast<Eigen::Index>(d.d_hidden);
    std::vector<Shape> s;
    s.push_back({d.n_queries, d.d_latent});
    for (int i = 0; i < d.depth; ++i) {
        s.push_back({1, d.d_latent});
        s.push_back({1, d.d_in});
        s.push_back({d.d_latent, d.d_latent});
        s.push_back({d.d_in, d.d_latent});
        s.push_back({d.d_in, d.d_latent});
        s.push_back({d.d_latent, d.d_latent});
        s.push_back({1, d.d_latent});
        s.push_back({d.d_latent, hidden});
        s.push_back({hidden, d.d_latent});
    }
    s.push_back({d.d_latent, d.d_out});
    return s;
}

} // namespace

void ResamplerParams::check_shapes() const {
    dims.validate();
    if (layers.size() != static_cast<std::size_t>(dims.depth)) {
        throw Error(ErrorKind::InvalidParam, "layer count does not match depth");
    }
    const auto shapes = expected_shapes(dims);
    const auto tensors = named();
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const auto& m = *tensors[i].second;
        if (m.rows() != shapes[i].rows || m.cols() != shapes[i].cols) {
            throw Error(ErrorKind::InvalidParam, "tensor " + tensors[i].first + " has shape " +
                                                     std::to_string(m.rows()) + "x" +
                                                     std::to_string(m.cols()));
        }
    }
}

ResamplerParams init_params(std::uint64_t seed, const ResamplerDims& dims) {
    dims.validate();
    ResamplerParams p;
    p.dims = dims;
    p.layers.resize(static_cast<std::size_t>(dims.depth));
    const auto shapes = expected_shapes(dims);
    auto tensors = p.named();
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const auto& [name, m] = tensors[i];
        const Shape s = shapes[i];
        if (name.find("norm_") != std::string::npos) {
            *m = MatrixXd::Ones(s.rows, s.cols);
            continue;
        }
        const double fan_in = name == "latents" ? static_cast<double>(dims.d_latent)
                                                : static_cast<double>(s.rows);
        // Uniform on [-a, a] has standard deviation a / sqrt(3).
        const double a = std::sqrt(3.0 / fan_in);
        detail::Rng rng(detail::mix_seed(seed, i));
        m->resize(s.rows, s.cols);
        for (Eigen::Index r = 0; r < s.rows; ++r) {
            for (Eigen::Index c = 0; c < s.cols; ++c) {
                (*m)(r, c) = rng.uniform(-a, a);
            }
        }
    }
    return p;
}

namespace {

struct RmsCache {
    MatrixXd xhat;  // x / r per row
    VectorXd inv_r; // 1 / r per row
};

MatrixXd rms_norm(const MatrixXd& x, const MatrixXd& gain, RmsCache* cache) {
    const auto n = static_cast<double>(x.cols());
    VectorXd inv_r(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        inv_r(i) = 1.0 / std::sqrt(x.row(i).squaredNorm() / n + kRmsEps);
    }
    MatrixXd xhat = inv_r.asDiagonal() * x;
    MatrixXd y = xhat * gain.row(0).asDiagonal();
    if (cache != nullptr) {
        cache->xhat = std::move(xhat);
        cache->inv_r = std::move(inv_r);
    }
    return y;
}

// Returns dx and accumulates the gain gradient.
MatrixXd rms_norm_backward(const MatrixXd& dy, const MatrixXd& gain, const RmsCache& cache,
                           MatrixXd& dgain) {
    const auto n = static_cast<double>(dy.cols());
    dgain += (dy.cwiseProduct(cache.xhat)).colwise().sum();
    const MatrixXd dxhat = dy * gain.row(0).asDiagonal();
    MatrixXd dx(dy.rows(), dy.cols());
    for (Eigen::Index i = 0; i < dy.rows(); ++i) {
        const double proj = dxhat.row(i).dot(cache.xhat.row(i)) / n;
        dx.row(i) = cache.inv_r(i) * (dxhat.row(i) - proj * cache.xhat.row(i));
    }
    return dx;
}

void softmax_rows(MatrixXd& s) {
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        const double mx = s.row(i).maxCoeff();
        s.row(i) = (s.row(i).array() - mx).exp();
        s.row(i) /= s.row(i).sum();
    }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct LayerCache {
    MatrixXd lat_in;
    RmsCache q_norm;
    MatrixXd ln; // normalized latents
    RmsCache kv_norm;
    MatrixXd xn;
    MatrixXd q, k, v;
    MatrixXd attn; // softmax weights
    MatrixXd o;    // attn * v
    RmsCache post_norm;
    MatrixXd hn;
    MatrixXd pre_act; // hn * w1
    MatrixXd act;     // silu(pre_act)
};

MatrixXd forward(const MatrixXd& x, const ResamplerParams& params,
                 std::vector<LayerCache>* caches, MatrixXd* final_latents) {
    params.check_shapes();
    if (x.rows() == 0) {
        throw Error(ErrorKind::EmptyInput, "resampler needs at least one token");
    }
    if (x.cols() != params.dims.d_in) {
        throw Error(ErrorKind::InvalidDimensions,
                    "token features have width " + std::to_string(x.cols()) + ", expected " +
                        std::to_string(params.dims.d_in));
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(params.dims.d_latent));
    MatrixXd lat = params.latents;
    for (const auto& layer : params.layers) {
        LayerCache c;
        c.lat_in = lat;
        c.ln = rms_norm(lat, layer.norm_q, &c.q_norm);
        c.xn = rms_norm(x, layer.norm_kv, &c.kv_norm);
        c.q = c.ln * layer.wq;
        c.k = c.xn * layer.wk;
        c.v = c.xn * layer.wv;
        c.attn = (c.q * c.k.transpose()) * scale;
        softmax_rows(c.attn);
        c.o = c.attn * c.v;
        const MatrixXd h = lat + c.o * layer.wo;
        c.hn = rms_norm(h, layer.norm_post, &c.post_norm);
        c.pre_act = c.hn * layer.w1;
        c.act = c.pre_act.unaryExpr([](double p) { return p * sigmoid(p); });
        lat = c.hn + c.act * layer.w2;
        if (caches != nullptr) {
            caches->push_back(std::move(c));
        }
    }
    if (final_latents != nullptr) {
        *final_latents = lat;
    }
    return lat * params.proj_out;
}

} // namespace

MatrixXd resample(const MatrixXd& x, const ResamplerParams& params) {
    return forward(x, params, nullptr, nullptr);
}

MatrixXd resample(const TokenFeatures& x, const ResamplerParams& params) {
    return resample(x.vectors, params);
}

std::vector<SummaryBlock> dual_resample(const TokenFeatures& object_tokens,
                                        const std::map<int, WindowFeatures>& windows,
                                        const ResamplerParams& params_global,
                                        const ResamplerParams& params_window) {
    if (object_tokens.vectors.rows() == 0) {
        throw Error(ErrorKind::EmptyInput,
                    "object " + std::to_string(object_tokens.object_id) + " has no tokens");
    }
    std::vector<SummaryBlock> blocks;
    blocks.push_back({std::nullopt, 0.0, resample(object_tokens.vectors, params_global)});

    std::vector<const std::pair<const int, WindowFeatures>*> occupied;
    for (const auto& entry : windows) {
        if (entry.second.vectors.rows() > 0) {
            occupied.push_back(&entry);
        }
    }
    std::vector<SummaryBlock> window_blocks(occupied.size());
    // Validate once up front so the parallel loop cannot throw.
    params_window.check_shapes();
    for (const auto* entry : occupied) {
        if (entry->second.vectors.cols() != params_window.dims.d_in) {
            throw Error(ErrorKind::InvalidDimensions, "window token width does not match d_in");
        }
    }
    const auto n = static_cast<long long>(occupied.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        const auto& [window, features] = *occupied[static_cast<std::size_t>(i)];
        const MatrixXd z = forward(features.vectors, params_window, nullptr, nullptr);
        MatrixXd block(z.rows(), z.cols() + 1);
        block.col(0).setConstant(features.start_seconds);
        block.rightCols(z.cols()) = z;
        window_blocks[static_cast<std::size_t>(i)] = {window, features.start_seconds, std::move(block)};
    }
    for (auto& b : window_blocks) {
        blocks.push_back(std::move(b));
    }
    return blocks;
}

MatrixXd concatenate_blocks(const std::vector<SummaryBlock>& blocks) {
    if (blocks.empty()) {
        return {};
    }
    Eigen::Index rows = 0;
    Eigen::Index width = -1;
    for (const auto& b : blocks) {
        const Eigen::Index d_out = b.window ? b.z.cols() - 1 : b.z.cols();
        if (width >= 0 && d_out != width) {
            throw Error(ErrorKind::InvalidDimensions, "summary blocks disagree on d_out");
        }
        width = d_out;
        rows += b.z.rows();
    }
    MatrixXd out(rows, width + 1);
    Eigen::Index r = 0;
    for (const auto& b : blocks) {
        if (b.window) {
            out.middleRows(r, b.z.rows()) = b.z;
        } else {
            out.middleRows(r, b.z.rows()).col(0).setConstant(std::numeric_limits<double>::quiet_NaN());
            out.middleRows(r, b.z.rows()).rightCols(width) = b.z;
        }
        r += b.z.rows();
    }
    return out;
}

Gradients loss_and_gradients(const MatrixXd& x, const ResamplerParams& params) {
    std::vector<LayerCache> caches;
    MatrixXd lat;
    const MatrixXd z = forward(x, params, &caches, &lat);
    const double scale = 1.0 / std::sqrt(static_cast<double>(params.dims.d_latent));

    Gradients g;
    g.loss = z.squaredNorm();
    ResamplerParams grad;
    grad.dims = params.dims;
    grad.layers.resize(params.layers.size());

    const MatrixXd dz = 2.0 * z;
    grad.proj_out = lat.transpose() * dz;
    MatrixXd dlat = dz * params.proj_out.transpose();

    for (std::size_t li = params.layers.size(); li-- > 0;) {
        const auto& layer = params.layers[li];
        const auto& c = caches[li];
        auto& gl = grad.layers[li];
        gl.norm_q = MatrixXd::Zero(1, layer.norm_q.cols());
        gl.norm_kv = MatrixXd::Zero(1, layer.norm_kv.cols());
        gl.norm_post = MatrixXd::Zero(1, layer.norm_post.cols());

        // MLP with residual from the normalized state.
        gl.w2 = c.act.transpose() * dlat;
        const MatrixXd dact = dlat * layer.w2.transpose();
        const MatrixXd dpre = dact.binaryExpr(c.pre_act, [](double d, double p) {
            const double s = sigmoid(p);
            return d * s * (1.0 + p * (1.0 - s));
        });
        gl.w1 = c.hn.transpose() * dpre;
        const MatrixXd dhn = dlat + dpre * layer.w1.transpose();
        const MatrixXd dh = rms_norm_backward(dhn, layer.norm_post, c.post_norm, gl.norm_post);

        // Attention block with residual.
        gl.wo = c.o.transpose() * dh;
        const MatrixXd d_o = dh * layer.wo.transpose();
        const MatrixXd dattn = d_o * c.v.transpose();
        const MatrixXd dv = c.attn.transpose() * d_o;
        MatrixXd ds = c.attn.cwiseProduct(dattn);
        const VectorXd row_dot = ds.rowwise().sum();
        ds = c.attn.cwiseProduct(dattn.colwise() - row_dot) * scale;
        const MatrixXd dq = ds * c.k;
        const MatrixXd dk = ds.transpose() * c.q;
        gl.wq = c.ln.transpose() * dq;
        gl.wk = c.xn.transpose() * dk;
        gl.wv = c.xn.transpose() * dv;
        const MatrixXd dxn = dk * layer.wk.transpose() + dv * layer.wv.transpose();
        rms_norm_backward(dxn, layer.norm_kv, c.kv_norm, gl.norm_kv);
        const MatrixXd dln = dq * layer.wq.transpose();
        dlat = dh + rms_norm_backward(dln, layer.norm_q, c.q_norm, gl.norm_q);
    }
    grad.latents = dlat;

    for (auto& [name, m] : grad.named()) {
        g.grads.emplace_back(name, std::move(*m));
    }
    return g;
}

namespace {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

// Forward pass over tensors in named() order, in any scalar type. Used by the
// finite-difference probe; mirrors forward() above without caching.
template <typename S>
Mat<S> forward_flat(const Mat<S>& x, const std::vector<Mat<S>>& t, int depth, int d_latent) {
    using std::exp;
    using std::sqrt;
    const S eps = static_cast<S>(kRmsEps);
    auto rms = [&](const Mat<S>& v, const Mat<S>& gain) {
        Mat<S> out(v.rows(), v.cols());
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            const S inv = S(1) / sqrt(v.row(i).squaredNorm() / static_cast<S>(v.cols()) + eps);
            out.row(i) = (v.row(i) * inv).cwiseProduct(gain.row(0));
        }
        return out;
    };
    const S scale = S(1) / sqrt(static_cast<S>(d_latent));
    Mat<S> lat = t[0];
    for (int l = 0; l < depth; ++l) {
        const std::size_t b = 1 + 9 * static_cast<std::size_t>(l);
        const Mat<S> ln = rms(lat, t[b]);
        const Mat<S> xn = rms(x, t[b + 1]);
        const Mat<S> q = ln * t[b + 2];
        const Mat<S> k = xn * t[b + 3];
        const Mat<S> v = xn * t[b + 4];
        Mat<S> a = (q * k.transpose()) * scale;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            const S mx = a.row(i).maxCoeff();
            for (Eigen::Index j = 0; j < a.cols(); ++j) {
                a(i, j) = exp(a(i, j) - mx);
            }
            a.row(i) /= a.row(i).sum();
        }
        const Mat<S> h = lat + (a * v) * t[b + 5];
        const Mat<S> hn = rms(h, t[b + 6]);
        Mat<S> act = hn * t[b + 7];
        for (Eigen::Index i = 0; i < act.size(); ++i) {
            const S p = act.data()[i];
            act.data()[i] = p / (S(1) + exp(-p));
        }
        lat = hn + act * t[b + 8];
    }
    return lat * t.back();
}

template <typename S>
GradCheckResult grad_check_in(const ResamplerParams& params, const MatrixXd& x,
                              const GradCheckOptions& options) {
    const Gradients analytic = loss_and_gradients(x, params);
    const auto names = params.named();
    std::vector<Mat<S>> probe;
    probe.reserve(names.size());
    for (const auto& [name, m] : names) {
        probe.push_back(m->template cast<S>());
    }
    const Mat<S> xs = x.cast<S>();
    const int depth = params.dims.depth;
    const int d_latent = params.dims.d_latent;
    const S step = static_cast<S>(options.step);

    detail::Rng rng(options.seed);
    GradCheckResult result;
    for (std::size_t t = 0; t < probe.size(); ++t) {
        Mat<S>& m = probe[t];
        const MatrixXd& ga = analytic.grads[t].second;
        std::vector<Eigen::Index> entries(static_cast<std::size_t>(m.size()));
        std::iota(entries.begin(), entries.end(), Eigen::Index{0});
        if (options.max_entries_per_tensor > 0 && entries.size() > options.max_entries_per_tensor) {
            // Partial Fisher-Yates with the portable generator.
            for (std::size_t i = 0; i < options.max_entries_per_tensor; ++i) {
                const auto j = i + static_cast<std::size_t>(rng.next() % (entries.size() - i));
                std::swap(entries[i], entries[j]);
            }
            entries.resize(options.max_entries_per_tensor);
        }
        for (const Eigen::Index e : entries) {
            S& w = m.data()[e];
            const S saved = w;
            w = saved + step;
            const Mat<S> up = forward_flat<S>(xs, probe, depth, d_latent);
            w = saved - step;
            const Mat<S> down = forward_flat<S>(xs, probe, depth, d_latent);
            w = saved;
            // L(w+h) - L(w-h) as sum((up - down) * (up + down)): same value,
            // but avoids cancelling two large sums of squares.
            const double numeric =
                static_cast<double>((up - down).cwiseProduct(up + down).sum() / (S(2) * step));
            const double a = ga.data()[e];
            const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
            ++result.entries_checked;
            if (rel > result.max_rel_error) {
                result.max_rel_error = rel;
                result.worst_tensor = names[t].first;
            }
        }
    }
    return result;
}

} // namespace

GradCheckResult grad_check(const ResamplerParams& params, const MatrixXd& x,
                           const GradCheckOptions& options) {
    params.check_shapes();
    if (options.extended_precision_probe) {
        return grad_check_in<long double>(params, x, options);
    }
    return grad_check_in<double>(params, x, options);
}

MatrixXd random_features(std::uint64_t seed, int n_tokens, int d) {
    if (n_tokens < 0 || d < 1) {
        throw Error(ErrorKind::InvalidParam, "feature matrix needs d >= 1 and n_tokens >= 0");
    }
    detail::Rng rng(seed);
    MatrixXd x(n_tokens, d);
    for (int r = 0; r < n_tokens; ++r) {
        for (int c = 0; c < d; ++c) {
            x(r, c) = rng.uniform(-1.0, 1.0);
        }
    }
    return x;
}

double permutation_error(const ResamplerParams& params, const MatrixXd& x, int n_permutations,
                         std::uint64_t seed) {
    const MatrixXd reference = resample(x, params);
    detail::Rng rng(seed);
    double worst = 0.0;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
    for (int p = 0; p < n_permutations; ++p) {
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng.next() % i)]);
        }
        MatrixXd shuffled(x.rows(), x.cols());
        for (std::size_t i = 0; i < order.size(); ++i) {
            shuffled.row(static_cast<Eigen::Index>(i)) = x.row(order[i]);
        }
        worst = std::max(worst, (resample(shuffled, params) - reference).cwiseAbs().maxCoeff());
    }
    return worst;
}

std::string params_to_manifest(const ResamplerParams& params) {
    params.check_shapes();
    detail::ojson j;
    const auto& d = params.dims;
    j["dims"] = {{"depth", d.depth},       {"n_queries", d.n_queries}, {"d_in", d.d_in},
                 {"d_latent", d.d_latent}, {"d_hidden", d.d_hidden},   {"d_out", d.d_out}};
    j["tensors"] = detail::ojson::array();
    for (const auto& [name, m] : params.named()) {
        detail::ojson t;
        t["name"] = name;
        t["shape"] = {m->rows(), m->cols()};
        auto values = detail::ojson::array();
        for (Eigen::Index r = 0; r < m->rows(); ++r) {
            for (Eigen::Index c = 0; c < m->cols(); ++c) {
                values.push_back((*m)(r, c));
            }
        }
        t["values"] = std::move(values);
        j["tensors"].push_back(std::move(t));
    }
    return j.dump() + "\n";
}

ResamplerParams params_from_manifest(const std::string& text) {
    constexpr std::string_view what = "parameter manifest";
    const detail::ojson j = detail::parse_json(text, what);
    ResamplerParams p;
    try {
        const auto& d = j.at("dims");
        p.dims = {d.at("depth").get<int>(),    d.at("n_queries").get<int>(),
                  d.at("d_in").get<int>(),     d.at("d_latent").get<int>(),
                  d.at("d_hidden").get<int>(), d.at("d_out").get<int>()};
        p.dims.validate();
        p.layers.resize(static_cast<std::size_t>(p.dims.depth));
        auto tensors = p.named();
        const auto& list = j.at("tensors");
        if (!list.is_array() || list.size() != tensors.size()) {
            detail::schema_error(what, "expected " + std::to_string(tensors.size()) + " tensors");
        }
        for (std::size_t i = 0; i < tensors.size(); ++i) {
            const auto& t = list[i];
            if (t.at("name").get<std::string>() != tensors[i].first) {
                detail::schema_error(what, "tensor " + std::to_string(i) + " should be " +
                                               tensors[i].first);
            }
            const auto rows = t.at("shape").at(0).get<Eigen::Index>();
            const auto cols = t.at("shape").at(1).get<Eigen::Index>();
            const auto& values = t.at("values");
            if (rows < 0 || cols < 0 || values.size() != static_cast<std::size_t>(rows * cols)) {
                detail::schema_error(what, "tensor " + tensors[i].first + " has the wrong value count");
            }
            MatrixXd& m = *tensors[i].second;
            m.resize(rows, cols);
            std::size_t k = 0;
            for (Eigen::Index r = 0; r < rows; ++r) {
                for (Eigen::Index c = 0; c < cols; ++c) {
                    m(r, c) = values[k++].get<double>();
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        detail::schema_error(what, e.what());
    }
    p.check_shapes();
    return p;
}

} // namespace vsg
