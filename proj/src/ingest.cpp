#include "lotmatch/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "lotmatch/csv.hpp"
#include "lotmatch/error.hpp"

namespace lotmatch {

namespace {

std::string trim(std::string_view s) {
    size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return std::string(s.substr(b, e - b));
}

void check_header(const Csv& csv, const std::vector<std::string>& expected, const std::filesystem::path& path) {
    bool ok = csv.header.size() == expected.size();
    if (ok)
        for (size_t i = 0; i < expected.size(); ++i)
            if (trim(csv.header[i]) != expected[i]) ok = false;
    if (!ok) {
        std::string want;
        for (size_t i = 0; i < expected.size(); ++i) {
            if (i) want += ",";
            want += expected[i];
        }
        throw data_error("missing or misnamed column in " + path.string() + " (expected header: " + want + ")");
    }
}

bool field_double(const std::vector<std::string>& row, size_t i, double& out) { return parse_double(row[i], out); }

bool field_long(const std::vector<std::string>& row, size_t i, long& out) { return parse_long(row[i], out); }

// Row loop shared by all layers: `build` returns true and fills `rec`, or
// appends the reject reason itself.
template <typename T, typename F>
ParseResult<T> parse_rows(const std::filesystem::path& path, const std::vector<std::string>& header, F build) {
    Csv csv = read_csv(path);
    check_header(csv, header, path);
    ParseResult<T> result;
    result.rows.reserve(csv.rows.size());
    for (size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& row = csv.rows[r];
        long line = static_cast<long>(r) + 2;  // header is line 1
        if (row.size() != header.size()) {
            result.rejects.push_back({RowIssue::Kind::MalformedRow, line, "", "wrong field count"});
            continue;
        }
        T rec;
        build(row, line, rec, result);
    }
    return result;
}

}  // namespace

// ---------------------------------------------------------------------------
// Crime taxonomy
// ---------------------------------------------------------------------------

CrimeCategoryMap CrimeCategoryMap::defaults() {
    CrimeCategoryMap m;
    for (const char* t : {"homicide", "rape", "robbery", "aggravated assault", "other assault"})
        m.map_[t] = CrimeCategory::Serious;
    for (const char* t : {"burglary", "theft", "vehicle theft", "vandalism", "public drunkenness",
                          "disorderly conduct", "vagrancy/loitering"})
        m.map_[t] = CrimeCategory::Other;
    for (const char* t : {"fraud", "embezzlement", "family offenses"})
        m.map_[t] = CrimeCategory::Excluded;
    return m;
}

CrimeCategoryMap CrimeCategoryMap::load(const std::filesystem::path& path) {
    CrimeCategoryMap m;
    auto lines = read_lines(path);
    for (size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.rfind(',');
        if (comma == std::string::npos)
            throw data_error("crime map " + path.string() + " line " + std::to_string(i + 1) + ": expected raw_type,category");
        std::string raw = to_lower(trim(line.substr(0, comma)));
        std::string cat = to_lower(trim(line.substr(comma + 1)));
        if (cat == "serious")
            m.map_[raw] = CrimeCategory::Serious;
        else if (cat == "other")
            m.map_[raw] = CrimeCategory::Other;
        else if (cat == "excluded")
            m.map_[raw] = CrimeCategory::Excluded;
        else
            throw data_error("crime map " + path.string() + " line " + std::to_string(i + 1) + ": unknown category '" + cat + "'");
    }
    return m;
}

CrimeCategory CrimeCategoryMap::categorize(std::string_view raw_type) const {
    auto it = map_.find(to_lower(trim(raw_type)));
    return it == map_.end() ? CrimeCategory::Excluded : it->second;
}

void CrimeCategoryMap::set(std::string_view raw_type, CrimeCategory cat) { map_[to_lower(trim(raw_type))] = cat; }

void CrimeCategoryMap::write(const std::filesystem::path& path) const {
    // Stable ordering so the shipped file is diffable.
    std::vector<std::pair<std::string, CrimeCategory>> entries(map_.begin(), map_.end());
    std::sort(entries.begin(), entries.end());
    AtomicWriter w(path);
    w.write("# raw_type,category  (category: serious | other | excluded)\n");
    w.write("# unrecognized raw types default to excluded\n");
    for (const auto& [raw, cat] : entries) w.row({raw, category_name(cat)});
    w.commit();
}

// ---------------------------------------------------------------------------
// Layer parsers
// ---------------------------------------------------------------------------

ParseResult<Lot> parse_lots(const std::filesystem::path& path) {
    return parse_rows<Lot>(
        path, {"id", "lon", "lat", "status", "greening_date"},
        [](const std::vector<std::string>& row, long line, Lot& lot, ParseResult<Lot>& res) {
            lot.id = row[0];
            if (!field_double(row, 1, lot.lon) || !field_double(row, 2, lot.lat)) {
                res.rejects.push_back({RowIssue::Kind::MalformedRow, line, lot.id, "bad coordinate"});
                return;
            }
            auto status = parse_status(row[3]);
            if (!status) {
                res.rejects.push_back({RowIssue::Kind::MalformedRow, line, lot.id, "bad status '" + row[3] + "'"});
                return;
            }
            lot.status = *status;
            const std::string& date_field = row[4];
            if (lot.status == LotStatus::Greened) {
                auto d = parse_date(date_field);
                if (!d) {
                    res.rejects.push_back({RowIssue::Kind::InvariantViolation, line, lot.id,
                                           "greened lot requires a valid greening_date"});
                    return;
                }
                if (*d < kGreeningLo || *d > kGreeningHi) {
                    res.rejects.push_back({RowIssue::Kind::InvariantViolation, line, lot.id,
                                           "greening_date outside [2007-09-01, 2017-09-01]"});
                    return;
                }
                lot.greening_date = *d;
            } else if (!date_field.empty()) {
                res.rejects.push_back({RowIssue::Kind::InvariantViolation, line, lot.id,
                                       "ungreened lot must have an empty greening_date"});
                return;
            }
            res.rows.push_back(std::move(lot));
        });
}

ParseResult<CrimeEvent> parse_crimes(const std::filesystem::path& path, const CrimeCategoryMap& categories) {
    return parse_rows<CrimeEvent>(
        path, {"id", "timestamp", "lon", "lat", "raw_type"},
        [&categories](const std::vector<std::string>& row, long line, CrimeEvent& ev, ParseResult<CrimeEvent>& res) {
            ev.id = row[0];
            auto when = parse_datetime(row[1]);
            if (!when) {
                res.rejects.push_back({RowIssue::Kind::MalformedRow, line, ev.id, "bad timestamp '" + row[1] + "'"});
                return;
            }
            ev.when = *when;
            if (ev.when.date < kCrimeLo || ev.when.date >= kCrimeHiExclusive) {
                res.rejects.push_back({RowIssue::Kind::InvariantViolation, line, ev.id,
                                       "timestamp outside [2007-01-01, 2020-01-01)"});
                return;
            }
            if (!field_double(row, 2, ev.lon) || !field_double(row, 3, ev.lat)) {
                res.rejects.push_back({RowIssue::Kind::MalformedRow, line, ev.id, "bad coordinate"});
                return;
            }
            ev.raw_type = row[4];
            ev.category = categories.categorize(ev.raw_type);
            res.rows.push_back(std::move(ev));
        });
}

ParseResult<CensusBlock> parse_blocks(const std::filesystem::path& path) {
    return parse_rows<CensusBlock>(
        path, {"id", "lon", "lat", "pop_total", "pop_white", "pop_black", "pop_hispanic", "pop_asian"},
        [](const std::vector<std::string>& row, long line, CensusBlock& b, ParseResult<CensusBlock>& res) {
            b.id = row[0];
            if (!field_double(row, 1, b.lon) || !field_double(row, 2, b.lat)) {
                res.rejects.push_back({RowIssue::Kind::MalformedRow, line, b.id, "bad coordinate"});
                return;
            }
            long* counts[] = {&b.pop_total, &b.pop_white, &b.pop_black, &b.pop_hispanic, &b.pop_asian};
            for (int i = 0; i < 5; ++i) {
                if (!field_long(row, static_cast<size_t>(3 + i), *counts[i])) {
                    res.rejects.push_back({RowIssue::Kind::MalformedRow, line, b.id, "bad count"});
                    return;
                }
            }
            for (int i = 0; i < 5; ++i) {
                if (*counts[i] < 0) {
                    res.rejects.push_back({RowIssue::Kind::InvariantViolation, line, b.id, "negative count"});
                    return;
                }
            }
            for (int i = 1; i < 5; ++i) {
                if (*counts[i] > b.pop_total) {
                    res.rejects.push_back(
                        {RowIssue::Kind::InvariantViolation, line, b.id, "race count exceeds pop_total"});
                    return;
                }
            }
            res.rows.push_back(std::move(b));
        });
}

ParseResult<BlockGroup> parse_blockgroups(const std::filesystem::path& path) {
    std::vector<std::string> header{"id", "lon", "lat", "per_capita_income"};
    for (int i = 1; i <= kPovertyBrackets; ++i) header.push_back("pov_b" + std::to_string(i));
    return parse_rows<BlockGroup>(
        path, header,
        [](const std::vector<std::string>& row, long line, BlockGroup& g, ParseResult<BlockGroup>& res) {
            g.id = row[0];
            if (!field_double(row, 1, g.lon) || !field_double(row, 2, g.lat) ||
                !field_double(row, 3, g.per_capita_income)) {
                res.rejects.push_back({RowIssue::Kind::MalformedRow, line, g.id, "bad numeric field"});
                return;
            }
            double sum = 0;
            for (int i = 0; i < kPovertyBrackets; ++i) {
                if (!field_double(row, static_cast<size_t>(4 + i), g.poverty_fracs[static_cast<size_t>(i)])) {
                    res.rejects.push_back({RowIssue::Kind::MalformedRow, line, g.id, "bad poverty fraction"});
                    return;
                }
                double f = g.poverty_fracs[static_cast<size_t>(i)];
                if (f < 0.0 || f > 1.0) {
                    res.rejects.push_back(
                        {RowIssue::Kind::InvariantViolation, line, g.id, "poverty fraction outside [0,1]"});
                    return;
                }
                sum += f;
            }
            if (std::abs(sum - 1.0) > 1e-6) {
                res.rejects.push_back({RowIssue::Kind::InvariantViolation, line, g.id,
                                       "poverty fractions sum to " + format_double(sum) + ", expected 1"});
                return;
            }
            res.rows.push_back(std::move(g));
        });
}

ParseResult<ZonedLot> parse_zoning(const std::filesystem::path& path) {
    return parse_rows<ZonedLot>(
        path, {"id", "lon", "lat", "area_sqm", "zoning"},
        [](const std::vector<std::string>& row, long line, ZonedLot& z, ParseResult<ZonedLot>& res) {
            z.id = row[0];
            if (!field_double(row, 1, z.lon) || !field_double(row, 2, z.lat) || !field_double(row, 3, z.area_sqm)) {
                res.rejects.push_back({RowIssue::Kind::MalformedRow, line, z.id, "bad numeric field"});
                return;
            }
            if (!(z.area_sqm > 0)) {
                res.rejects.push_back({RowIssue::Kind::InvariantViolation, line, z.id, "area must be > 0"});
                return;
            }
            z.zoning = parse_zoning(row[4]);
            res.rows.push_back(std::move(z));
        });
}

ParseResult<Business> parse_businesses(const std::filesystem::path& path) {
    return parse_rows<Business>(
        path, {"id", "lon", "lat", "types"},
        [](const std::vector<std::string>& row, long line, Business& b, ParseResult<Business>& res) {
            b.id = row[0];
            if (!field_double(row, 1, b.lon) || !field_double(row, 2, b.lat)) {
                res.rejects.push_back({RowIssue::Kind::MalformedRow, line, b.id, "bad coordinate"});
                return;
            }
            const std::string& types = row[3];
            size_t start = 0;
            for (size_t i = 0; i <= types.size(); ++i) {
                if (i == types.size() || types[i] == ';') {
                    std::string_view tok(types.data() + start, i - start);
                    if (!tok.empty()) {
                        auto t = parse_business_type(tok);
                        if (!t) {
                            res.rejects.push_back({RowIssue::Kind::InvariantViolation, line, b.id,
                                                   "unknown business type '" + std::string(tok) + "'"});
                            return;
                        }
                        b.types |= static_cast<uint16_t>(1u << static_cast<int>(*t));
                    }
                    start = i + 1;
                }
            }
            if (b.types == 0) {
                res.rejects.push_back({RowIssue::Kind::InvariantViolation, line, b.id, "types must be non-empty"});
                return;
            }
            res.rows.push_back(std::move(b));
        });
}

// ---------------------------------------------------------------------------
// Serializers (same schemas; parse(write(t)) == t)
// ---------------------------------------------------------------------------

void write_lots(const std::filesystem::path& path, const std::vector<Lot>& rows) {
    AtomicWriter w(path);
    w.write("id,lon,lat,status,greening_date\n");
    for (const auto& r : rows)
        w.row({r.id, format_double(r.lon), format_double(r.lat), status_name(r.status),
               r.greening_date ? format_date(*r.greening_date) : std::string()});
    w.commit();
}

void write_crimes(const std::filesystem::path& path, const std::vector<CrimeEvent>& rows) {
    AtomicWriter w(path);
    w.write("id,timestamp,lon,lat,raw_type\n");
    for (const auto& r : rows)
        w.row({r.id, format_datetime(r.when), format_double(r.lon), format_double(r.lat), r.raw_type});
    w.commit();
}

void write_blocks(const std::filesystem::path& path, const std::vector<CensusBlock>& rows) {
    AtomicWriter w(path);
    w.write("id,lon,lat,pop_total,pop_white,pop_black,pop_hispanic,pop_asian\n");
    for (const auto& r : rows)
        w.row({r.id, format_double(r.lon), format_double(r.lat), std::to_string(r.pop_total),
               std::to_string(r.pop_white), std::to_string(r.pop_black), std::to_string(r.pop_hispanic),
               std::to_string(r.pop_asian)});
    w.commit();
}

void write_blockgroups(const std::filesystem::path& path, const std::vector<BlockGroup>& rows) {
    AtomicWriter w(path);
    std::string header = "id,lon,lat,per_capita_income";
    for (int i = 1; i <= kPovertyBrackets; ++i) header += ",pov_b" + std::to_string(i);
    w.write(header + "\n");
    for (const auto& r : rows) {
        std::vector<std::string> fields{r.id, format_double(r.lon), format_double(r.lat),
                                        format_double(r.per_capita_income)};
        for (double f : r.poverty_fracs) fields.push_back(format_double(f));
        w.row(fields);
    }
    w.commit();
}

void write_zoning(const std::filesystem::path& path, const std::vector<ZonedLot>& rows) {
    AtomicWriter w(path);
    w.write("id,lon,lat,area_sqm,zoning\n");
    for (const auto& r : rows)
        w.row({r.id, format_double(r.lon), format_double(r.lat), format_double(r.area_sqm),
               kZoningNames[static_cast<size_t>(r.zoning)]});
    w.commit();
}

void write_businesses(const std::filesystem::path& path, const std::vector<Business>& rows) {
    AtomicWriter w(path);
    w.write("id,lon,lat,types\n");
    for (const auto& r : rows) {
        std::string types;
        for (int t = 0; t < kBusinessTypes; ++t) {
            if (r.has_type(static_cast<BusinessType>(t))) {
                if (!types.empty()) types += ';';
                types += kBusinessNames[static_cast<size_t>(t)];
            }
        }
        w.row({r.id, format_double(r.lon), format_double(r.lat), types});
    }
    w.commit();
}

}  // namespace lotmatch
