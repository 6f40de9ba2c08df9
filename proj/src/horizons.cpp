#include "ertbp/ephemeris.hpp"

#include "ertbp/errors.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>

namespace ertbp {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (out.size() > 1 && out.back().empty()) out.pop_back();
    return out;
}

bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

// "A.D. 2017-Feb-17 00:00:00.0000"
bool parse_timestamp(std::string_view s, Date& date, double& seconds) {
    constexpr std::string_view prefix = "A.D.";
    if (s.substr(0, prefix.size()) != prefix) return false;
    s = trim(s.substr(prefix.size()));
    const std::size_t space = s.find(' ');
    try {
        date = parse_date(s.substr(0, space));
    } catch (const Error&) {
        return false;
    }
    seconds = 0;
    if (space == std::string_view::npos) return true;
    const std::string_view clock = trim(s.substr(space + 1));
    if (clock.size() < 8 || clock[2] != ':' || clock[5] != ':') return false;
    double h = 0, m = 0, sec = 0;
    if (!parse_double(clock.substr(0, 2), h) || !parse_double(clock.substr(3, 2), m) ||
        !parse_double(clock.substr(6), sec))
        return false;
    if (h >= 24 || m >= 60 || sec >= 61) return false;
    seconds = 3600 * h + 60 * m + sec;
    return true;
}

std::mutex& cache_mutex() {
    static std::mutex m;
    return m;
}

std::string sanitize(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.') {
            out += c;
        } else if (!out.empty() && out.back() != '_') {
            out += '_';
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::vector<EphemerisRecord> horizons_parse(std::string_view text, double days_per_ut) {
    std::vector<EphemerisRecord> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#' || line == "$$SOE" || line == "$$EOE") continue;

        std::vector<std::string_view> f = split_fields(line);
        if (f.size() == 8 && f[0].substr(0, 4) != "A.D." && f[1].substr(0, 4) == "A.D.") f.erase(f.begin());
        if (f.size() != 7) {
            throw MalformedRecord(line_no, "expected a date and 6 numeric fields, found " + std::to_string(f.size()) +
                                               " fields");
        }
        EphemerisRecord r;
        if (!parse_timestamp(f[0], r.date, r.seconds_of_day))
            throw MalformedRecord(line_no, "unparseable date '" + std::string(f[0]) + "'");
        double v[6];
        for (std::size_t k = 0; k < 6; ++k) {
            if (!parse_double(f[k + 1], v[k]))
                throw MalformedRecord(line_no, "not a number: '" + std::string(f[k + 1]) + "'");
        }
        r.position = {v[0], v[1], v[2]};
        r.velocity_day = {v[3], v[4], v[5]};
        r.velocity_ut = r.velocity_day * days_per_ut;
        out.push_back(r);
    }
    return out;
}

std::string HorizonsRequest::cache_key() const {
    // The endpoint enters through a short digest so the name stays readable.
    std::uint32_t h = 2166136261u;
    for (unsigned char c : endpoint) h = (h ^ c) * 16777619u;
    char digest[9];
    std::snprintf(digest, sizeof digest, "%08x", h);
    return "horizons_" + sanitize(body_id) + "_" + sanitize(start) + "_" + sanitize(stop) + "_" + sanitize(step) +
           "_" + digest + ".txt";
}

std::string extract_vector_block(std::string_view response) {
    const std::size_t soe = response.find("$$SOE");
    const std::size_t eoe = response.find("$$EOE");
    if (soe == std::string_view::npos || eoe == std::string_view::npos || eoe < soe)
        throw Error(ErrorKind::UpstreamFormatChange, "response has no $$SOE..$$EOE vector block");
    std::string_view block = response.substr(soe + 5, eoe - soe - 5);
    if (!block.empty() && block.front() == '\r') block.remove_prefix(1);
    if (!block.empty() && block.front() == '\n') block.remove_prefix(1);
    std::string out;
    out.reserve(block.size());
    for (char c : block)
        if (c != '\r') out += c;
    return out;
}

std::string horizons_fetch(const HorizonsRequest& request, const FetchOptions& options) {
    std::lock_guard<std::mutex> lock(cache_mutex());
    const std::filesystem::path cached = options.cache_dir / request.cache_key();
    if (!options.cache_dir.empty() && std::filesystem::exists(cached)) return read_file(cached);
    if (!options.network_enabled) {
        throw Error(ErrorKind::NetworkUnavailable,
                    "no cached table at " + cached.string() + " and network access is disabled");
    }

    const std::size_t scheme_end = request.endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw Error(ErrorKind::Config, "endpoint must be an absolute URL: " + request.endpoint);
    const std::size_t path_start = request.endpoint.find('/', scheme_end + 3);
    const std::string origin = request.endpoint.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : request.endpoint.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(options.timeout_s);
    client.set_read_timeout(options.timeout_s);
    client.set_follow_location(true);
    const httplib::Params query{
        {"format", "text"},          {"COMMAND", "'" + request.body_id + "'"},
        {"OBJ_DATA", "NO"},          {"MAKE_EPHEM", "YES"},
        {"EPHEM_TYPE", "VECTORS"},   {"CENTER", "'500@0'"},
        {"START_TIME", "'" + request.start + "'"},
        {"STOP_TIME", "'" + request.stop + "'"},
        {"STEP_SIZE", "'" + request.step + "'"},
        {"REF_PLANE", "ECLIPTIC"},   {"REF_SYSTEM", "ICRF"},
        {"OUT_UNITS", "AU-D"},       {"VEC_TABLE", "2"},
        {"VEC_LABELS", "NO"},        {"CSV_FORMAT", "YES"},
    };
    httplib::Result res = client.Get(path, query, httplib::Headers{});
    if (!res) {
        throw Error(ErrorKind::NetworkUnavailable,
                    "request to " + origin + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw Error(ErrorKind::NetworkUnavailable, "HTTP status " + std::to_string(res->status) + " from " + origin);
    }
    std::string block = extract_vector_block(res->body);
    try {
        if (horizons_parse(block, 1.0).empty())
            throw Error(ErrorKind::UpstreamFormatChange, "vector block contains no records");
    } catch (const MalformedRecord& e) {
        throw Error(ErrorKind::UpstreamFormatChange, std::string("fetched table does not parse: ") + e.what());
    }

    if (!options.cache_dir.empty()) {
        std::filesystem::create_directories(options.cache_dir);
        const std::filesystem::path tmp = cached.string() + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
            out << block;
        }
        std::filesystem::rename(tmp, cached);
    }
    return block;
}

}  // namespace ertbp
