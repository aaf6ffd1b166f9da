#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "physarum/core.hpp"

namespace physarum {

enum class ArenaShape { Disc, Rectangle };

// Dish or tank geometry. World coordinates are centred on the arena midpoint.
struct ArenaSpec {
    ArenaShape shape = ArenaShape::Disc;
    double radius = 45.0;  // mm, disc only
    double width = 0.0;    // mm, rectangle only
    double height = 0.0;   // mm, rectangle only
    double cell_size = 0.5;

    static ArenaSpec disc(double radius, double cell_size = 0.5);
    static ArenaSpec rectangle(double width, double height, double cell_size = 0.5);

    void validate() const;  // throws ConfigError
    double extent_x() const { return shape == ArenaShape::Disc ? 2.0 * radius : width; }
    double extent_y() const { return shape == ArenaShape::Disc ? 2.0 * radius : height; }
    bool contains(Vec2 p, double margin = 0.0) const;
    // Nearest point inside the arena, keeping `margin` off the wall.
    Vec2 clamp_inside(Vec2 p, double margin = 0.0) const;
};

struct NutrientSource {
    Vec2 position;
    double emission_rate = 1.0;  // concentration units per minute
    std::string color = "plain";
    int host_body = -1;  // body id carrying this source, -1 if none
};

// Discretised attractant + repellent concentration over the arena mask,
// updated by explicit 5-point diffusion with first-order decay.
class ChemoField {
  public:
    ChemoField(const ArenaSpec& spec, double diffusion, double decay, double dt = 0.1);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double cell_size() const { return h_; }
    double dt() const { return dt_; }
    double diffusion() const { return diffusion_; }
    double decay() const { return decay_; }
    const ArenaSpec& spec() const { return spec_; }

    bool in_mask(Vec2 p) const;
    int cell_of(Vec2 p) const;  // -1 when outside grid
    Vec2 cell_center(int idx) const;

    std::span<const double> attractant() const { return attract_; }
    std::span<const double> repellent() const { return repel_; }
    std::span<const uint8_t> mask() const { return mask_; }
    double& attract_cell(int idx) { return attract_[idx]; }
    double& repel_cell(int idx) { return repel_[idx]; }

    // Deposit emission_rate * dt * weight into the source's cell. Negative
    // weights deposit |weight|-scaled mass into the repellent grid.
    void emit(const NutrientSource& src, double weight, double dt);

    // One diffusion-decay step of length dt() with zero-flux boundaries.
    void step();

    // Net gradient (attractant - repellent), bilinearly interpolated central
    // differences. Throws QueryError outside the arena.
    Vec2 gradient_at(Vec2 p) const;

    double total_attractant() const;
    double total_repellent() const;

  private:
    void diffuse_decay(std::vector<double>& grid);

    ArenaSpec spec_;
    int nx_ = 0, ny_ = 0;
    double h_ = 0.5, diffusion_ = 0.0, decay_ = 0.0, dt_ = 0.1;
    std::vector<double> attract_, repel_, scratch_;
    std::vector<uint8_t> mask_;
    std::vector<int32_t> nbr_;  // 4 neighbour indices per cell, self when off-mask
    Vec2 gradient_cell(int ix, int iy) const;
};

ChemoField build_arena(const ArenaSpec& spec, double diffusion, double decay, double dt = 0.1);

// weights[i] applies to sources[i]; see graphstore::color_weight.
void emit_sources(ChemoField& field, std::span<const NutrientSource> sources,
                  std::span<const double> weights, double dt);

}  // namespace physarum
