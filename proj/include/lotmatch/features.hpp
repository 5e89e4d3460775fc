#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lotmatch/geo.hpp"
#include "lotmatch/types.hpp"

namespace lotmatch {

// Fixed covariate layout. Column order is the covariates.csv contract.
namespace cov {
inline constexpr int pop_total = 0;
inline constexpr int frac_white = 1;
inline constexpr int frac_black = 2;
inline constexpr int frac_hispanic = 3;
inline constexpr int frac_asian = 4;
inline constexpr int per_capita_income = 5;
inline constexpr int pov_b1 = 6;  // brackets run through pov_b7 = 12
inline constexpr int land_first = 13;  // residential..vacant, ZoningType order
inline constexpr int biz_first = 21;   // cafe..restaurant, BusinessType order
inline constexpr int business_count = 29;
}  // namespace cov

inline constexpr int kNumCovariates = 30;

const std::array<std::string, kNumCovariates>& covariate_names();
int covariate_index(std::string_view name);  // -1 when unknown

struct CovariateVector {
    std::array<double, kNumCovariates> v{};
    // Provenance notes: empty neighborhoods produce zero measures but the
    // vector is kept; dropping lots is a propensity-stage concern.
    bool no_zoning_in_radius = false;
    bool no_blocks_in_radius = false;
    bool no_population = false;

    double operator[](int i) const { return v[static_cast<size_t>(i)]; }
};

// Context layers with their spatial indexes, built once and shared read-only
// across worker threads.
struct ContextLayers {
    const std::vector<CensusBlock>* blocks = nullptr;
    const std::vector<BlockGroup>* blockgroups = nullptr;
    const std::vector<ZonedLot>* zoning = nullptr;
    const std::vector<Business>* businesses = nullptr;
    GridIndex block_index;
    GridIndex zoning_index;
    GridIndex business_index;
};

ContextLayers build_context(const std::vector<CensusBlock>& blocks, const std::vector<BlockGroup>& blockgroups,
                            const std::vector<ZonedLot>& zoning, const std::vector<Business>& businesses,
                            double cell_size);

// Area-weighted share of each named zoning type among zoned lots whose
// centroid falls within r; all-zero when the neighborhood has no zoned lot.
std::array<double, kNamedZoningTypes> land_use_proportions(double x, double y, const ContextLayers& ctx, double r,
                                                           bool* empty = nullptr);

// pop_total plus white/black/hispanic/asian fractions (zero when pop 0).
std::array<double, 5> demographic_features(double x, double y, const ContextLayers& ctx, double r,
                                           bool* empty = nullptr);

// Income and poverty brackets copied from the nearest block-group centroid;
// distance ties resolve to the lexicographically smallest id. Throws
// Error(Data) when the block-group table is empty.
std::array<double, 1 + kPovertyBrackets> economic_features(double x, double y, const ContextLayers& ctx);

// Eight presence indicators plus the business count; a multi-type business
// counts once.
std::array<double, kBusinessTypes + 1> business_features(double x, double y, const ContextLayers& ctx, double r);

CovariateVector covariates_for_point(double x, double y, const ContextLayers& ctx, double r);

struct CovariateRow {
    std::string lot_id;
    CovariateVector vec;
};

// One vector per lot, canonically ordered by lot id regardless of input
// order. Fans out across worker threads.
std::vector<CovariateRow> build_covariates(const std::vector<Lot>& lots, const ContextLayers& ctx, double r);

void write_covariates(const std::filesystem::path& path, const std::vector<CovariateRow>& rows);
void write_covariate_flags(const std::filesystem::path& path, const std::vector<CovariateRow>& rows);

struct CovariateTable {
    std::vector<std::string> ids;           // sorted ascending
    std::vector<std::array<double, kNumCovariates>> values;

    int find(std::string_view id) const;    // index or -1
};

CovariateTable read_covariates(const std::filesystem::path& path);

}  // namespace lotmatch
