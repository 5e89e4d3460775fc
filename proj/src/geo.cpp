#include "lotmatch/geo.hpp"

#include <cmath>

#include "lotmatch/error.hpp"

namespace lotmatch {

namespace {
constexpr double kDegToRad = 0.017453292519943295;

uint64_t cell_key(int32_t cx, int32_t cy) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(cx)) << 32) | static_cast<uint32_t>(cy);
}
}  // namespace

void Projection::project(double lon, double lat, double& x, double& y) const {
    if (std::abs(lat) >= 89.0) throw data_error("latitude out of range: " + std::to_string(lat));
    x = kEarthRadiusM * (lon - ref_lon) * std::cos(ref_lat * kDegToRad) * kDegToRad;
    y = kEarthRadiusM * (lat - ref_lat) * kDegToRad;
}

void Projection::inverse(double x, double y, double& lon, double& lat) const {
    lon = ref_lon + x / (kEarthRadiusM * std::cos(ref_lat * kDegToRad) * kDegToRad);
    lat = ref_lat + y / (kEarthRadiusM * kDegToRad);
}

Projection projection_for_lots(const std::vector<Lot>& lots) {
    if (lots.empty()) throw data_error("cannot derive projection from an empty lot table");
    double slon = 0, slat = 0;
    for (const auto& l : lots) {
        slon += l.lon;
        slat += l.lat;
    }
    return Projection{slon / static_cast<double>(lots.size()), slat / static_cast<double>(lots.size())};
}

void project_layers(const Projection& proj, CityTables& t) {
    for (auto& r : t.lots) proj.project(r.lon, r.lat, r.x, r.y);
    for (auto& r : t.crimes) proj.project(r.lon, r.lat, r.x, r.y);
    for (auto& r : t.blocks) proj.project(r.lon, r.lat, r.x, r.y);
    for (auto& r : t.blockgroups) proj.project(r.lon, r.lat, r.x, r.y);
    for (auto& r : t.zoning) proj.project(r.lon, r.lat, r.x, r.y);
    for (auto& r : t.businesses) proj.project(r.lon, r.lat, r.x, r.y);
}

GridIndex::GridIndex(std::span<const IndexedPoint> points, double cell_size) : cell_(cell_size) {
    if (!(cell_size > 0)) throw data_error("grid cell size must be positive");
    points_.assign(points.begin(), points.end());
    cells_.reserve(points_.size());
    for (uint32_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        cells_[cell_key(cell_of(p.x), cell_of(p.y))].push_back(i);
    }
}

int32_t GridIndex::cell_of(double v) const { return static_cast<int32_t>(std::floor(v / cell_)); }

void GridIndex::for_each_within(double cx, double cy, double r,
                                const std::function<void(const IndexedPoint&)>& fn) const {
    if (points_.empty()) return;
    const double r2 = r * r;
    const int32_t x0 = cell_of(cx - r), x1 = cell_of(cx + r);
    const int32_t y0 = cell_of(cy - r), y1 = cell_of(cy + r);
    for (int32_t gx = x0; gx <= x1; ++gx) {
        for (int32_t gy = y0; gy <= y1; ++gy) {
            auto it = cells_.find(cell_key(gx, gy));
            if (it == cells_.end()) continue;
            for (uint32_t idx : it->second) {
                const auto& p = points_[idx];
                const double dx = p.x - cx, dy = p.y - cy;
                if (dx * dx + dy * dy <= r2) fn(p);
            }
        }
    }
}

size_t GridIndex::count_within(double cx, double cy, double r) const {
    size_t n = 0;
    for_each_within(cx, cy, r, [&n](const IndexedPoint&) { ++n; });
    return n;
}

double GridIndex::weighted_sum_within(double cx, double cy, double r) const {
    double s = 0;
    for_each_within(cx, cy, r, [&s](const IndexedPoint& p) { s += p.weight; });
    return s;
}

std::vector<uint32_t> GridIndex::collect_within(double cx, double cy, double r) const {
    std::vector<uint32_t> out;
    for_each_within(cx, cy, r, [&out](const IndexedPoint& p) { out.push_back(p.id); });
    return out;
}

GridIndex build_index(std::span<const IndexedPoint> points, double cell_size) {
    return GridIndex(points, cell_size);
}

namespace {
template <typename T>
GridIndex index_table(const std::vector<T>& rows, double cell_size, double (*weight)(const T&)) {
    std::vector<IndexedPoint> pts;
    pts.reserve(rows.size());
    for (uint32_t i = 0; i < rows.size(); ++i)
        pts.push_back({i, rows[i].x, rows[i].y, weight ? weight(rows[i]) : 1.0});
    return GridIndex(pts, cell_size);
}
}  // namespace

GridIndex index_crimes(const std::vector<CrimeEvent>& crimes, double cell_size) {
    return index_table<CrimeEvent>(crimes, cell_size, nullptr);
}

GridIndex index_blocks(const std::vector<CensusBlock>& blocks, double cell_size) {
    return index_table<CensusBlock>(blocks, cell_size, nullptr);
}

GridIndex index_zoning(const std::vector<ZonedLot>& zoning, double cell_size) {
    return index_table<ZonedLot>(zoning, cell_size, [](const ZonedLot& z) { return z.area_sqm; });
}

GridIndex index_businesses(const std::vector<Business>& businesses, double cell_size) {
    return index_table<Business>(businesses, cell_size, nullptr);
}

}  // namespace lotmatch
