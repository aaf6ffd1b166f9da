#include "physarum/arena.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace physarum {

ArenaSpec ArenaSpec::disc(double radius, double cell_size) {
    ArenaSpec s;
    s.shape = ArenaShape::Disc;
    s.radius = radius;
    s.cell_size = cell_size;
    return s;
}

ArenaSpec ArenaSpec::rectangle(double width, double height, double cell_size) {
    ArenaSpec s;
    s.shape = ArenaShape::Rectangle;
    s.width = width;
    s.height = height;
    s.cell_size = cell_size;
    return s;
}

void ArenaSpec::validate() const {
    if (cell_size <= 0.0) throw ConfigError("arena cell_size must be > 0, got " + std::to_string(cell_size));
    if (shape == ArenaShape::Disc) {
        if (radius <= 0.0) throw ConfigError("disc radius must be > 0, got " + std::to_string(radius));
        if (2.0 * radius / cell_size < 8.0)
            throw ConfigError("disc grid smaller than 8 cells per axis (radius " + std::to_string(radius) +
                              " mm, cell " + std::to_string(cell_size) + " mm)");
    } else {
        if (width <= 0.0 || height <= 0.0)
            throw ConfigError("rectangle sides must be > 0, got " + std::to_string(width) + " x " +
                              std::to_string(height));
        if (width / cell_size < 8.0 || height / cell_size < 8.0)
            throw ConfigError("rectangle grid smaller than 8 cells per axis");
    }
}

bool ArenaSpec::contains(Vec2 p, double margin) const {
    if (shape == ArenaShape::Disc) return p.norm() <= radius - margin;
    return std::abs(p.x) <= width / 2.0 - margin && std::abs(p.y) <= height / 2.0 - margin;
}

Vec2 ArenaSpec::clamp_inside(Vec2 p, double margin) const {
    if (shape == ArenaShape::Disc) {
        double r = radius - margin;
        if (r <= 0.0) return {0.0, 0.0};
        double n = p.norm();
        if (n <= r) return p;
        return p * (r / n);
    }
    double hx = width / 2.0 - margin, hy = height / 2.0 - margin;
    return {std::clamp(p.x, -hx, hx), std::clamp(p.y, -hy, hy)};
}

ChemoField::ChemoField(const ArenaSpec& spec, double diffusion, double decay, double dt)
    : spec_(spec), diffusion_(diffusion), decay_(decay), dt_(dt) {
    spec.validate();
    if (diffusion < 0.0) throw ConfigError("diffusion coefficient must be >= 0");
    if (decay < 0.0) throw ConfigError("decay rate must be >= 0");
    if (dt <= 0.0) throw ConfigError("field dt must be > 0");
    h_ = spec.cell_size;
    if (diffusion > 0.0) {
        double bound = h_ * h_ / (4.0 * diffusion);
        if (dt > bound + 1e-12) {
            std::ostringstream os;
            os << "explicit diffusion unstable: dt " << dt << " exceeds cell_size^2/(4 D) = " << bound
               << " (cell " << h_ << " mm, D " << diffusion << " mm^2/min)";
            throw ConfigError(os.str());
        }
    }
    nx_ = std::max(1, static_cast<int>(std::llround(spec.extent_x() / h_)));
    ny_ = std::max(1, static_cast<int>(std::llround(spec.extent_y() / h_)));
    const std::size_t n = static_cast<std::size_t>(nx_) * ny_;
    attract_.assign(n, 0.0);
    repel_.assign(n, 0.0);
    scratch_.assign(n, 0.0);
    mask_.assign(n, 0);
    for (int iy = 0; iy < ny_; ++iy)
        for (int ix = 0; ix < nx_; ++ix) {
            Vec2 c = cell_center(iy * nx_ + ix);
            mask_[iy * nx_ + ix] = spec.contains(c) ? 1 : 0;
        }
    // Neighbour table; off-mask neighbours point at the cell itself, which
    // makes the 5-point Laplacian zero-flux at the mask boundary.
    nbr_.assign(4 * n, 0);
    auto at = [&](int ix, int iy) { return iy * nx_ + ix; };
    for (int iy = 0; iy < ny_; ++iy)
        for (int ix = 0; ix < nx_; ++ix) {
            int i = at(ix, iy);
            int west = ix > 0 && mask_[at(ix - 1, iy)] ? at(ix - 1, iy) : i;
            int east = ix < nx_ - 1 && mask_[at(ix + 1, iy)] ? at(ix + 1, iy) : i;
            int south = iy > 0 && mask_[at(ix, iy - 1)] ? at(ix, iy - 1) : i;
            int north = iy < ny_ - 1 && mask_[at(ix, iy + 1)] ? at(ix, iy + 1) : i;
            nbr_[4 * i + 0] = west;
            nbr_[4 * i + 1] = east;
            nbr_[4 * i + 2] = south;
            nbr_[4 * i + 3] = north;
        }
}

bool ChemoField::in_mask(Vec2 p) const {
    int idx = cell_of(p);
    return idx >= 0 && mask_[idx];
}

int ChemoField::cell_of(Vec2 p) const {
    int ix = static_cast<int>(std::floor((p.x + spec_.extent_x() / 2.0) / h_));
    int iy = static_cast<int>(std::floor((p.y + spec_.extent_y() / 2.0) / h_));
    if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_) return -1;
    return iy * nx_ + ix;
}

Vec2 ChemoField::cell_center(int idx) const {
    int iy = idx / nx_, ix = idx % nx_;
    return {(ix + 0.5) * h_ - spec_.extent_x() / 2.0, (iy + 0.5) * h_ - spec_.extent_y() / 2.0};
}

void ChemoField::emit(const NutrientSource& src, double weight, double dt) {
    int idx = cell_of(src.position);
    if (idx < 0 || !mask_[idx])
        throw ScenarioError("nutrient source at (" + std::to_string(src.position.x) + ", " +
                            std::to_string(src.position.y) + ") lies outside the arena");
    double amount = src.emission_rate * dt * std::abs(weight);
    if (weight >= 0.0)
        attract_[idx] += src.emission_rate * dt * weight;
    else
        repel_[idx] += amount;
}

void emit_sources(ChemoField& field, std::span<const NutrientSource> sources,
                  std::span<const double> weights, double dt) {
    for (std::size_t i = 0; i < sources.size(); ++i)
        field.emit(sources[i], i < weights.size() ? weights[i] : 1.0, dt);
}

void ChemoField::diffuse_decay(std::vector<double>& grid) {
    const double a = diffusion_ * dt_ / (h_ * h_);
    const double d = decay_ * dt_;
    const std::size_t n = grid.size();
    const double* g = grid.data();
    double* out = scratch_.data();
    const int32_t* nb = nbr_.data();
    for (std::size_t i = 0; i < n; ++i) {
        if (!mask_[i]) {
            out[i] = 0.0;
            continue;
        }
        double c = g[i];
        double lap = g[nb[4 * i]] + g[nb[4 * i + 1]] + g[nb[4 * i + 2]] + g[nb[4 * i + 3]] - 4.0 * c;
        double v = c + a * lap - d * c;
        out[i] = v > 0.0 ? v : 0.0;
    }
    grid.swap(scratch_);
}

void ChemoField::step() {
    diffuse_decay(attract_);
    diffuse_decay(repel_);
}

Vec2 ChemoField::gradient_cell(int ix, int iy) const {
    int i = iy * nx_ + ix;
    if (!mask_[i]) return {0.0, 0.0};
    auto diff = [&](const std::vector<double>& g) -> Vec2 {
        double w = g[nbr_[4 * i + 0]], e = g[nbr_[4 * i + 1]];
        double s = g[nbr_[4 * i + 2]], nn = g[nbr_[4 * i + 3]];
        // Central difference; collapses to one-sided 0 at mask edges because
        // off-mask neighbours mirror the centre value.
        double denom_x = (nbr_[4 * i] != i ? 1.0 : 0.0) + (nbr_[4 * i + 1] != i ? 1.0 : 0.0);
        double denom_y = (nbr_[4 * i + 2] != i ? 1.0 : 0.0) + (nbr_[4 * i + 3] != i ? 1.0 : 0.0);
        Vec2 out;
        out.x = denom_x > 0.0 ? (e - w) / (denom_x * h_) : 0.0;
        out.y = denom_y > 0.0 ? (nn - s) / (denom_y * h_) : 0.0;
        return out;
    };
    return diff(attract_) - diff(repel_);
}

Vec2 ChemoField::gradient_at(Vec2 p) const {
    if (!spec_.contains(p))
        throw QueryError("gradient query at (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                         ") outside the arena");
    // Bilinear interpolation between the four surrounding cell-centre gradients.
    double fx = (p.x + spec_.extent_x() / 2.0) / h_ - 0.5;
    double fy = (p.y + spec_.extent_y() / 2.0) / h_ - 0.5;
    int ix0 = static_cast<int>(std::floor(fx)), iy0 = static_cast<int>(std::floor(fy));
    double tx = fx - ix0, ty = fy - iy0;
    ix0 = std::clamp(ix0, 0, nx_ - 1);
    iy0 = std::clamp(iy0, 0, ny_ - 1);
    int ix1 = std::min(ix0 + 1, nx_ - 1), iy1 = std::min(iy0 + 1, ny_ - 1);
    Vec2 g00 = gradient_cell(ix0, iy0), g10 = gradient_cell(ix1, iy0);
    Vec2 g01 = gradient_cell(ix0, iy1), g11 = gradient_cell(ix1, iy1);
    return g00 * ((1 - tx) * (1 - ty)) + g10 * (tx * (1 - ty)) + g01 * ((1 - tx) * ty) + g11 * (tx * ty);
}

double ChemoField::total_attractant() const {
    double s = 0.0;
    for (double v : attract_) s += v;
    return s;
}

double ChemoField::total_repellent() const {
    double s = 0.0;
    for (double v : repel_) s += v;
    return s;
}

ChemoField build_arena(const ArenaSpec& spec, double diffusion, double decay, double dt) {
    return ChemoField(spec, diffusion, decay, dt);
}

}  // namespace physarum
