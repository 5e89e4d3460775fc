#include "lotmatch/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lotmatch/csv.hpp"
#include "lotmatch/error.hpp"
#include "lotmatch/parallel.hpp"

namespace lotmatch {

const std::array<std::string, kNumCovariates>& covariate_names() {
    static const std::array<std::string, kNumCovariates> names = [] {
        std::array<std::string, kNumCovariates> n;
        n[cov::pop_total] = "pop_total";
        n[cov::frac_white] = "frac_white";
        n[cov::frac_black] = "frac_black";
        n[cov::frac_hispanic] = "frac_hispanic";
        n[cov::frac_asian] = "frac_asian";
        n[cov::per_capita_income] = "per_capita_income";
        for (int i = 0; i < kPovertyBrackets; ++i)
            n[static_cast<size_t>(cov::pov_b1 + i)] = "pov_b" + std::to_string(i + 1);
        for (int i = 0; i < kNamedZoningTypes; ++i)
            n[static_cast<size_t>(cov::land_first + i)] = "land_" + std::string(kZoningNames[static_cast<size_t>(i)]);
        for (int i = 0; i < kBusinessTypes; ++i)
            n[static_cast<size_t>(cov::biz_first + i)] = "biz_" + std::string(kBusinessNames[static_cast<size_t>(i)]);
        n[cov::business_count] = "business_count";
        return n;
    }();
    return names;
}

int covariate_index(std::string_view name) {
    const auto& names = covariate_names();
    for (int i = 0; i < kNumCovariates; ++i)
        if (names[static_cast<size_t>(i)] == name) return i;
    return -1;
}

ContextLayers build_context(const std::vector<CensusBlock>& blocks, const std::vector<BlockGroup>& blockgroups,
                            const std::vector<ZonedLot>& zoning, const std::vector<Business>& businesses,
                            double cell_size) {
    ContextLayers ctx;
    ctx.blocks = &blocks;
    ctx.blockgroups = &blockgroups;
    ctx.zoning = &zoning;
    ctx.businesses = &businesses;
    ctx.block_index = index_blocks(blocks, cell_size);
    ctx.zoning_index = index_zoning(zoning, cell_size);
    ctx.business_index = index_businesses(businesses, cell_size);
    return ctx;
}

std::array<double, kNamedZoningTypes> land_use_proportions(double x, double y, const ContextLayers& ctx, double r,
                                                           bool* empty) {
    std::array<double, kNamedZoningTypes> out{};
    double per_type[kNamedZoningTypes + 1] = {};  // +1 for Other, counted in the denominator only
    double total = 0;
    ctx.zoning_index.for_each_within(x, y, r, [&](const IndexedPoint& p) {
        const ZonedLot& z = (*ctx.zoning)[p.id];
        per_type[static_cast<int>(z.zoning)] += z.area_sqm;
        total += z.area_sqm;
    });
    if (empty) *empty = !(total > 0);
    if (total > 0)
        for (int i = 0; i < kNamedZoningTypes; ++i) out[static_cast<size_t>(i)] = per_type[i] / total;
    return out;
}

std::array<double, 5> demographic_features(double x, double y, const ContextLayers& ctx, double r, bool* empty) {
    long pop = 0, white = 0, black = 0, hispanic = 0, asian = 0;
    size_t blocks_seen = 0;
    ctx.block_index.for_each_within(x, y, r, [&](const IndexedPoint& p) {
        const CensusBlock& b = (*ctx.blocks)[p.id];
        ++blocks_seen;
        pop += b.pop_total;
        white += b.pop_white;
        black += b.pop_black;
        hispanic += b.pop_hispanic;
        asian += b.pop_asian;
    });
    if (empty) *empty = blocks_seen == 0;
    std::array<double, 5> out{};
    out[0] = static_cast<double>(pop);
    if (pop > 0) {
        out[1] = static_cast<double>(white) / static_cast<double>(pop);
        out[2] = static_cast<double>(black) / static_cast<double>(pop);
        out[3] = static_cast<double>(hispanic) / static_cast<double>(pop);
        out[4] = static_cast<double>(asian) / static_cast<double>(pop);
    }
    return out;
}

std::array<double, 1 + kPovertyBrackets> economic_features(double x, double y, const ContextLayers& ctx) {
    const auto& groups = *ctx.blockgroups;
    if (groups.empty()) throw data_error("no block groups available for economic features");
    size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < groups.size(); ++i) {
        const double dx = groups[i].x - x, dy = groups[i].y - y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2 || (d2 == best_d2 && groups[i].id < groups[best].id)) {
            best_d2 = d2;
            best = i;
        }
    }
    std::array<double, 1 + kPovertyBrackets> out{};
    out[0] = groups[best].per_capita_income;
    for (int i = 0; i < kPovertyBrackets; ++i) out[static_cast<size_t>(1 + i)] = groups[best].poverty_fracs[static_cast<size_t>(i)];
    return out;
}

std::array<double, kBusinessTypes + 1> business_features(double x, double y, const ContextLayers& ctx, double r) {
    std::array<double, kBusinessTypes + 1> out{};
    long count = 0;
    ctx.business_index.for_each_within(x, y, r, [&](const IndexedPoint& p) {
        const Business& b = (*ctx.businesses)[p.id];
        ++count;
        for (int t = 0; t < kBusinessTypes; ++t)
            if (b.has_type(static_cast<BusinessType>(t))) out[static_cast<size_t>(t)] = 1.0;
    });
    out[kBusinessTypes] = static_cast<double>(count);
    return out;
}

CovariateVector covariates_for_point(double x, double y, const ContextLayers& ctx, double r) {
    CovariateVector cvec;
    bool no_blocks = false, no_zoning = false;

    auto demo = demographic_features(x, y, ctx, r, &no_blocks);
    cvec.v[cov::pop_total] = demo[0];
    cvec.v[cov::frac_white] = demo[1];
    cvec.v[cov::frac_black] = demo[2];
    cvec.v[cov::frac_hispanic] = demo[3];
    cvec.v[cov::frac_asian] = demo[4];

    auto econ = economic_features(x, y, ctx);
    cvec.v[cov::per_capita_income] = econ[0];
    for (int i = 0; i < kPovertyBrackets; ++i) cvec.v[static_cast<size_t>(cov::pov_b1 + i)] = econ[static_cast<size_t>(1 + i)];

    auto land = land_use_proportions(x, y, ctx, r, &no_zoning);
    for (int i = 0; i < kNamedZoningTypes; ++i) cvec.v[static_cast<size_t>(cov::land_first + i)] = land[static_cast<size_t>(i)];

    auto biz = business_features(x, y, ctx, r);
    for (int i = 0; i < kBusinessTypes; ++i) cvec.v[static_cast<size_t>(cov::biz_first + i)] = biz[static_cast<size_t>(i)];
    cvec.v[cov::business_count] = biz[kBusinessTypes];

    cvec.no_zoning_in_radius = no_zoning;
    cvec.no_blocks_in_radius = no_blocks;
    cvec.no_population = demo[0] == 0.0;
    return cvec;
}

std::vector<CovariateRow> build_covariates(const std::vector<Lot>& lots, const ContextLayers& ctx, double r) {
    if (!(r > 0)) throw data_error("covariate radius must be positive");
    // Canonical output order: ascending lot id.
    std::vector<size_t> order(lots.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return lots[a].id < lots[b].id; });

    std::vector<CovariateRow> rows(lots.size());
    parallel_for(lots.size(), [&](size_t k) {
        const Lot& lot = lots[order[k]];
        rows[k].lot_id = lot.id;
        rows[k].vec = covariates_for_point(lot.x, lot.y, ctx, r);
    });
    return rows;
}

void write_covariates(const std::filesystem::path& path, const std::vector<CovariateRow>& rows) {
    AtomicWriter w(path);
    std::string header = "lot_id";
    for (const auto& n : covariate_names()) header += "," + n;
    w.write(header + "\n");
    for (const auto& row : rows) {
        std::vector<std::string> fields;
        fields.reserve(1 + kNumCovariates);
        fields.push_back(row.lot_id);
        for (double v : row.vec.v) fields.push_back(format_double(v));
        w.row(fields);
    }
    w.commit();
}

void write_covariate_flags(const std::filesystem::path& path, const std::vector<CovariateRow>& rows) {
    AtomicWriter w(path);
    w.write("lot_id,no_zoning_in_radius,no_blocks_in_radius,no_population\n");
    for (const auto& row : rows)
        w.row({row.lot_id, row.vec.no_zoning_in_radius ? "1" : "0", row.vec.no_blocks_in_radius ? "1" : "0",
               row.vec.no_population ? "1" : "0"});
    w.commit();
}

CovariateTable read_covariates(const std::filesystem::path& path) {
    Csv csv = read_csv(path);
    if (csv.header.size() != 1 + kNumCovariates || csv.header[0] != "lot_id")
        throw data_error("unexpected covariates header in " + path.string());
    const auto& names = covariate_names();
    for (int i = 0; i < kNumCovariates; ++i)
        if (csv.header[static_cast<size_t>(i + 1)] != names[static_cast<size_t>(i)])
            throw data_error("unexpected covariate column '" + csv.header[static_cast<size_t>(i + 1)] + "' in " + path.string());
    CovariateTable table;
    table.ids.reserve(csv.rows.size());
    table.values.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        if (row.size() != 1 + kNumCovariates) throw data_error("short covariate row in " + path.string());
        table.ids.push_back(row[0]);
        std::array<double, kNumCovariates> vals{};
        for (int i = 0; i < kNumCovariates; ++i)
            if (!parse_double(row[static_cast<size_t>(i + 1)], vals[static_cast<size_t>(i)]))
                throw data_error("bad covariate value in " + path.string());
        table.values.push_back(vals);
    }
    // The file is written sorted; tolerate arbitrary order on read.
    std::vector<size_t> order(table.ids.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return table.ids[a] < table.ids[b]; });
    CovariateTable sorted;
    sorted.ids.reserve(order.size());
    sorted.values.reserve(order.size());
    for (size_t i : order) {
        sorted.ids.push_back(std::move(table.ids[i]));
        sorted.values.push_back(table.values[i]);
    }
    return sorted;
}

int CovariateTable::find(std::string_view id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) return -1;
    return static_cast<int>(it - ids.begin());
}

}  // namespace lotmatch
