#include "vsg/synthetic_world.hpp"

#include "rng.hpp"
#include "vsg/errors.hpp"
#include "vsg/mask_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vsg {

namespace {

int snap(double v) { return static_cast<int>(std::floor(v + 0.5)); }

struct Placement {
    double x;
    double y;
};

Placement place(const ShapeSpec& shape, FrameIndex frame) {
    const double dt = static_cast<double>(frame - shape.entry_frame);
    return {shape.x + shape.vx * dt, shape.y + shape.vy * dt};
}

// Calls fn(px, py) for every lattice point of the shape, unclipped.
template <typename Fn>
void for_each_pixel(const ShapeSpec& shape, FrameIndex frame, Fn&& fn) {
    const Placement p = place(shape, frame);
    if (shape.kind == ShapeKind::Rectangle) {
        const int x0 = snap(p.x);
        const int y0 = snap(p.y);
        for (int y = y0; y < y0 + shape.h; ++y) {
            for (int x = x0; x < x0 + shape.w; ++x) {
                fn(x, y);
            }
        }
        return;
    }
    const double r2 = shape.radius * shape.radius;
    const int y_lo = static_cast<int>(std::ceil(p.y - shape.radius));
    const int y_hi = static_cast<int>(std::floor(p.y + shape.radius));
    const int x_lo = static_cast<int>(std::ceil(p.x - shape.radius));
    const int x_hi = static_cast<int>(std::floor(p.x + shape.radius));
    for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
            const double dx = x - p.x;
            const double dy = y - p.y;
            if (dx * dx + dy * dy <= r2) {
                fn(x, y);
            }
        }
    }
}

bool exists_at(const ShapeSpec& shape, FrameIndex frame) {
    return frame >= shape.entry_frame && frame < shape.exit_frame;
}

BinaryMask split_half(const BinaryMask& mask, bool top) {
    const auto box = bbox_of(mask);
    Bits bits = rle_decode(mask);
    if (!box) {
        return mask;
    }
    const int rows = box->y2 - box->y1 + 1;
    const int cut = box->y1 + rows / 2; // first row of the bottom half
    for (int y = 0; y < mask.height; ++y) {
        const bool keep = top ? y < cut : y >= cut;
        if (!keep) {
            std::fill_n(bits.begin() + static_cast<std::ptrdiff_t>(y) * mask.width, mask.width,
                        std::uint8_t{0});
        }
    }
    return rle_encode(bits, mask.width, mask.height);
}

BinaryMask jitter(const BinaryMask& mask, int k) {
    if (k > 0) {
        return dilate(mask, k);
    }
    if (k < 0) {
        return erode(mask, -k);
    }
    return mask;
}

} // namespace

void SceneSpec::validate() const {
    if (n_frames <= 0 || width <= 0 || height <= 0) {
        throw Error(ErrorKind::InvalidSpec, "scene needs positive n_frames, width and height");
    }
    if (!(fps > 0.0)) {
        throw Error(ErrorKind::InvalidSpec, "scene fps must be positive");
    }
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const auto& s = shapes[i];
        const std::string where = "shape " + std::to_string(i) + ": ";
        if (!(s.entry_frame >= 0 && s.entry_frame < s.exit_frame && s.exit_frame <= n_frames)) {
            throw Error(ErrorKind::InvalidSpec, where + "needs 0 <= entry < exit <= n_frames");
        }
        if (s.kind == ShapeKind::Rectangle && (s.w <= 0 || s.h <= 0)) {
            throw Error(ErrorKind::InvalidSpec, where + "rectangle size must be positive");
        }
        if (s.kind == ShapeKind::Disk && !(s.radius > 0.0)) {
            throw Error(ErrorKind::InvalidSpec, where + "disk radius must be positive");
        }
        bool inside = true;
        std::size_t count = 0;
        for_each_pixel(s, s.entry_frame, [&](int x, int y) {
            ++count;
            inside = inside && x >= 0 && y >= 0 && x < width && y < height;
        });
        if (!inside || count == 0) {
            throw Error(ErrorKind::InvalidSpec, where + "does not fit the frame at entry");
        }
    }
}

void NoiseSpec::validate() const {
    for (double p : {drop_prob, split_prob, duplicate_prob}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(ErrorKind::InvalidSpec, "noise probabilities must lie in [0, 1]");
        }
    }
    if (jitter_px < 0) {
        throw Error(ErrorKind::InvalidSpec, "jitter_px must be non-negative");
    }
}

std::size_t unclipped_area(const ShapeSpec& shape, FrameIndex frame) {
    std::size_t count = 0;
    for_each_pixel(shape, frame, [&](int, int) { ++count; });
    return count;
}

BinaryMask rasterize_shape(const ShapeSpec& shape, FrameIndex frame, int width, int height) {
    Bits bits(static_cast<std::size_t>(width) * height, 0);
    if (exists_at(shape, frame)) {
        for_each_pixel(shape, frame, [&](int x, int y) {
            if (x >= 0 && y >= 0 && x < width && y < height) {
                bits[static_cast<std::size_t>(y) * width + x] = 1;
            }
        });
    }
    return rle_encode(bits, width, height);
}

World generate_scene(const SceneSpec& spec) {
    spec.validate();
    const int w = spec.width;
    const int h = spec.height;
    const std::size_t n_pixels = static_cast<std::size_t>(w) * h;
    const int n_shapes = static_cast<int>(spec.shapes.size());

    std::vector<int> paint_order(spec.shapes.size());
    std::iota(paint_order.begin(), paint_order.end(), 0);
    std::stable_sort(paint_order.begin(), paint_order.end(), [&](int a, int b) {
        return !spec.shapes[static_cast<std::size_t>(a)].occluder &&
               spec.shapes[static_cast<std::size_t>(b)].occluder;
    });

    // Visible masks by source (background = n_shapes slot).
    std::vector<std::map<FrameIndex, BinaryMask>> visible(static_cast<std::size_t>(n_shapes) + 1);
    for (FrameIndex t = 0; t < spec.n_frames; ++t) {
        std::vector<int> owner(n_pixels, -1);
        for (int s : paint_order) {
            const auto& shape = spec.shapes[static_cast<std::size_t>(s)];
            if (!exists_at(shape, t)) {
                continue;
            }
            for_each_pixel(shape, t, [&](int x, int y) {
                if (x >= 0 && y >= 0 && x < w && y < h) {
                    owner[static_cast<std::size_t>(y) * w + x] = s;
                }
            });
        }
        for (int s = 0; s <= n_shapes; ++s) {
            const bool is_background = s == n_shapes;
            if (is_background && !spec.background) {
                continue;
            }
            if (!is_background && !exists_at(spec.shapes[static_cast<std::size_t>(s)], t)) {
                continue;
            }
            Bits bits(n_pixels, 0);
            std::size_t visible_count = 0;
            const int match = is_background ? -1 : s;
            for (std::size_t i = 0; i < n_pixels; ++i) {
                if (owner[i] == match) {
                    bits[i] = 1;
                    ++visible_count;
                }
            }
            const std::size_t full =
                is_background ? n_pixels : unclipped_area(spec.shapes[static_cast<std::size_t>(s)], t);
            if (visible_count == 0 ||
                static_cast<double>(visible_count) < kVisibilityFloor * static_cast<double>(full)) {
                continue;
            }
            visible[static_cast<std::size_t>(s)].emplace(t, rle_encode(bits, w, h));
        }
    }

    struct Candidate {
        int source; // -1 = background
        FrameIndex first;
        std::size_t first_area;
        int rank; // background 0, shapes 1..n
    };
    std::vector<Candidate> candidates;
    for (int s = 0; s <= n_shapes; ++s) {
        const auto& masks = visible[static_cast<std::size_t>(s)];
        if (masks.empty()) {
            continue;
        }
        const bool is_background = s == n_shapes;
        candidates.push_back({is_background ? -1 : s, masks.begin()->first,
                              area(masks.begin()->second), is_background ? 0 : s + 1});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.first != b.first) {
            return a.first < b.first;
        }
        if (a.first_area != b.first_area) {
            return a.first_area > b.first_area;
        }
        return a.rank < b.rank;
    });

    World world;
    world.spec = spec;
    ObjectId next = 1;
    for (const auto& c : candidates) {
        const std::size_t slot = c.source < 0 ? static_cast<std::size_t>(n_shapes)
                                              : static_cast<std::size_t>(c.source);
        Trajectory traj{next, c.first, std::move(visible[slot])};
        world.source[next] = c.source;
        world.trajectories.push_back(std::move(traj));
        ++next;
    }
    world.video = to_mask_video(world.trajectories, w, h, spec.fps, spec.n_frames);
    return world;
}

std::vector<BinaryMask> noisy_proposals(std::span<const BinaryMask> gt_masks,
                                        const NoiseSpec& noise, FrameIndex frame) {
    noise.validate();
    detail::Rng rng(detail::mix_seed(noise.seed, static_cast<std::uint64_t>(frame)));
    std::vector<BinaryMask> out;
    for (const auto& gt : gt_masks) {
        // Fixed number of draws per object keeps later objects' noise
        // independent of earlier outcomes.
        const double u_drop = rng.uniform();
        const double u_split = rng.uniform();
        const double u_dup = rng.uniform();
        const int j_first = rng.integer(-noise.jitter_px, noise.jitter_px);
        const int j_second = rng.integer(-noise.jitter_px, noise.jitter_px);
        const int j_dup = rng.integer(-noise.jitter_px, noise.jitter_px);

        if (u_drop < noise.drop_prob || area(gt) == 0) {
            continue;
        }
        std::vector<std::pair<BinaryMask, int>> parts;
        if (u_split < noise.split_prob && bbox_of(gt)->y2 > bbox_of(gt)->y1) {
            parts.emplace_back(split_half(gt, true), j_first);
            parts.emplace_back(split_half(gt, false), j_second);
        } else {
            parts.emplace_back(gt, j_first);
        }
        if (u_dup < noise.duplicate_prob) {
            parts.emplace_back(gt, j_dup);
        }
        for (auto& [mask, k] : parts) {
            BinaryMask m = jitter(mask, k);
            if (area(m) > 0) {
                out.push_back(std::move(m));
            }
        }
    }
    return out;
}

ProposalVideo noisy_proposal_video(const MaskVideo& video, const NoiseSpec& noise) {
    ProposalVideo out(static_cast<std::size_t>(video.n_frames));
    for (const auto& frame : video.frames) {
        std::vector<BinaryMask> gt;
        gt.reserve(frame.masks.size());
        for (const auto& [id, mask] : frame.masks) {
            gt.push_back(mask);
        }
        out[static_cast<std::size_t>(frame.frame_index)] = noisy_proposals(gt, noise, frame.frame_index);
    }
    return out;
}

OraclePropagator::OraclePropagator(std::vector<Trajectory> ground_truth, int width, int height,
                                   std::optional<NoiseSpec> degradation)
    : ground_truth_(std::move(ground_truth)),
      width_(width),
      height_(height),
      degradation_(std::move(degradation)) {
    if (degradation_) {
        degradation_->validate();
    }
}

OraclePropagator::OraclePropagator(const World& world, std::optional<NoiseSpec> degradation)
    : OraclePropagator(world.trajectories, world.spec.width, world.spec.height,
                       std::move(degradation)) {}

void OraclePropagator::reset() { bindings_.clear(); }

void OraclePropagator::add_object(ObjectId id, FrameIndex frame, const BinaryMask& mask) {
    Binding binding{std::nullopt, mask};
    double best = 0.0;
    for (std::size_t i = 0; i < ground_truth_.size(); ++i) {
        if (const BinaryMask* gt = ground_truth_[i].at(frame)) {
            const double score = iou(mask, *gt);
            if (score > best) {
                best = score;
                binding.gt_index = i;
            }
        }
    }
    if (best < 0.1) {
        binding.gt_index.reset();
    }
    bindings_[id] = std::move(binding);
}

std::map<ObjectId, BinaryMask> OraclePropagator::propagate(FrameIndex /*current_frame*/,
                                                           FrameIndex target_frame) {
    std::map<ObjectId, BinaryMask> out;
    detail::Rng rng(detail::mix_seed(degradation_ ? degradation_->seed : 0,
                                     static_cast<std::uint64_t>(target_frame) + 0x5bd1e995ULL));
    for (const auto& [id, binding] : bindings_) {
        const double u_drop = rng.uniform();
        const int k = degradation_ ? rng.integer(-degradation_->jitter_px, degradation_->jitter_px) : 0;
        if (!binding.gt_index) {
            out.emplace(id, binding.ghost);
            continue;
        }
        const BinaryMask* gt = ground_truth_[*binding.gt_index].at(target_frame);
        if (gt == nullptr || (degradation_ && u_drop < degradation_->drop_prob)) {
            out.emplace(id, BinaryMask::empty(width_, height_));
            continue;
        }
        out.emplace(id, degradation_ ? jitter(*gt, k) : *gt);
    }
    return out;
}

std::optional<ObjectId> OraclePropagator::binding(ObjectId id) const {
    auto it = bindings_.find(id);
    if (it == bindings_.end() || !it->second.gt_index) {
        return std::nullopt;
    }
    return ground_truth_[*it->second.gt_index].object_id;
}

SceneSpec random_scene_spec(std::uint64_t seed, int n_frames, int width, int height) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        detail::Rng rng(detail::mix_seed(seed, attempt));
        SceneSpec spec;
        spec.seed = seed;
        spec.n_frames = n_frames;
        spec.width = width;
        spec.height = height;
        spec.background = true;

        const int n_shapes = rng.integer(2, 4);
        for (int i = 0; i < n_shapes; ++i) {
            ShapeSpec s;
            s.kind = rng.bernoulli(0.5) ? ShapeKind::Rectangle : ShapeKind::Disk;
            s.vx = rng.integer(-2, 2);
            s.vy = rng.integer(-1, 1);
            // First shape always starts at frame 0; the rest enter later half
            // of the time.
            s.entry_frame = (i == 0 || rng.bernoulli(0.5)) ? 0 : rng.integer(1, n_frames / 2);
            s.exit_frame = rng.bernoulli(0.3) ? rng.integer(s.entry_frame + 4, n_frames) : n_frames;
            if (s.kind == ShapeKind::Rectangle) {
                s.w = rng.integer(6, 14);
                s.h = rng.integer(6, 12);
                s.x = rng.integer(0, width - s.w);
                s.y = rng.integer(0, height - s.h);
            } else {
                s.radius = rng.integer(3, 7);
                const int r = static_cast<int>(s.radius);
                s.x = rng.integer(r, width - 1 - r);
                s.y = rng.integer(r, height - 1 - r);
            }
            spec.shapes.push_back(s);
        }
        if (rng.bernoulli(0.6)) {
            // Horizontal occluder sweeping across the middle rows.
            ShapeSpec occ;
            occ.kind = ShapeKind::Rectangle;
            occ.w = rng.integer(6, 10);
            occ.h = rng.integer(8, 16);
            occ.x = 0;
            occ.y = rng.integer(0, height - occ.h);
            occ.vx = 3;
            occ.entry_frame = 0;
            occ.exit_frame = n_frames;
            occ.occluder = true;
            spec.shapes.push_back(occ);
        }

        // Keep scenes where every shape is visible on its scheduled entry
        // frame, so entry frames are observable.
        const World world = generate_scene(spec);
        bool observable = true;
        for (std::size_t i = 0; i < spec.shapes.size() && observable; ++i) {
            bool found = false;
            for (const auto& [id, src] : world.source) {
                if (src == static_cast<int>(i)) {
                    const auto& traj = world.trajectories[static_cast<std::size_t>(id - 1)];
                    found = traj.entry_frame == spec.shapes[i].entry_frame;
                }
            }
            observable = found;
        }
        if (observable) {
            return spec;
        }
    }
}

} // namespace vsg
