#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lotmatch/dates.hpp"

namespace lotmatch {

enum class LotStatus : uint8_t { Greened, Ungreened };

enum class CrimeCategory : uint8_t { Serious, Other, Excluded };

// Eight aggregated designations; anything else lands in Other and is counted
// only in land-use denominators, never as a named proportion.
enum class ZoningType : uint8_t {
    Residential,
    Commercial,
    Industrial,
    Civic,
    Transportation,
    Cultural,
    Water,
    Vacant,
    Other
};
inline constexpr int kNamedZoningTypes = 8;

enum class BusinessType : uint8_t { Cafe, Convenience, Gym, Liquor, Lodging, Nightlife, Pharmacy, Restaurant };
inline constexpr int kBusinessTypes = 8;

inline constexpr std::array<std::string_view, 9> kZoningNames{
    "residential", "commercial", "industrial", "civic", "transportation",
    "cultural",    "water",      "vacant",     "other"};

inline constexpr std::array<std::string_view, 8> kBusinessNames{
    "cafe", "convenience", "gym", "liquor", "lodging", "nightlife", "pharmacy", "restaurant"};

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

inline std::optional<LotStatus> parse_status(std::string_view s) {
    auto l = to_lower(s);
    if (l == "greened") return LotStatus::Greened;
    if (l == "ungreened") return LotStatus::Ungreened;
    return std::nullopt;
}

inline std::string_view status_name(LotStatus s) { return s == LotStatus::Greened ? "greened" : "ungreened"; }

inline ZoningType parse_zoning(std::string_view s) {
    auto l = to_lower(s);
    for (size_t i = 0; i < kZoningNames.size(); ++i)
        if (l == kZoningNames[i]) return static_cast<ZoningType>(i);
    return ZoningType::Other;
}

inline std::optional<BusinessType> parse_business_type(std::string_view s) {
    auto l = to_lower(s);
    for (size_t i = 0; i < kBusinessNames.size(); ++i)
        if (l == kBusinessNames[i]) return static_cast<BusinessType>(i);
    return std::nullopt;
}

inline std::string_view category_name(CrimeCategory c) {
    switch (c) {
        case CrimeCategory::Serious: return "serious";
        case CrimeCategory::Other: return "other";
        default: return "excluded";
    }
}

// Planar x/y are filled by the geoindex projection after parsing.
struct Lot {
    std::string id;
    double lon = 0, lat = 0;
    double x = 0, y = 0;
    LotStatus status = LotStatus::Ungreened;
    std::optional<Date> greening_date;  // present iff status == Greened
};

struct CrimeEvent {
    std::string id;
    DateTime when;
    double lon = 0, lat = 0;
    double x = 0, y = 0;
    std::string raw_type;
    CrimeCategory category = CrimeCategory::Excluded;
};

struct CensusBlock {
    std::string id;
    double lon = 0, lat = 0;
    double x = 0, y = 0;
    long pop_total = 0;
    long pop_white = 0, pop_black = 0, pop_hispanic = 0, pop_asian = 0;
};

inline constexpr int kPovertyBrackets = 7;

struct BlockGroup {
    std::string id;
    double lon = 0, lat = 0;
    double x = 0, y = 0;
    double per_capita_income = 0;
    std::array<double, kPovertyBrackets> poverty_fracs{};
};

struct ZonedLot {
    std::string id;
    double lon = 0, lat = 0;
    double x = 0, y = 0;
    double area_sqm = 0;
    ZoningType zoning = ZoningType::Other;
};

struct Business {
    std::string id;
    double lon = 0, lat = 0;
    double x = 0, y = 0;
    uint16_t types = 0;  // bitmask over BusinessType, non-empty

    bool has_type(BusinessType t) const { return (types >> static_cast<int>(t)) & 1; }
};

// Greening dates are constrained to the program window; crime timestamps to
// the data coverage.
inline constexpr Date kGreeningLo = make_date(2007, 9, 1);
inline constexpr Date kGreeningHi = make_date(2017, 9, 1);
inline constexpr Date kCrimeLo = make_date(2007, 1, 1);
inline constexpr Date kCrimeHiExclusive = make_date(2020, 1, 1);

struct CityTables {
    std::vector<Lot> lots;
    std::vector<CrimeEvent> crimes;
    std::vector<CensusBlock> blocks;
    std::vector<BlockGroup> blockgroups;
    std::vector<ZonedLot> zoning;
    std::vector<Business> businesses;
};

}  // namespace lotmatch
