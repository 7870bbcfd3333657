#include "lexforge/overlap.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lexforge/common.hpp"
#include "lexforge/numerics.hpp"
#include "lexforge/unicode.hpp"

namespace lexforge {

std::pair<std::set<std::string>, double> lexical_overlap(const Vocabulary& target,
                                                         const Vocabulary& base) {
    std::set<std::string> tokens;
    std::size_t target_non_special = 0;
    for (std::size_t i = target.num_specials(); i < target.size(); ++i) {
        ++target_non_special;
        const std::string& t = target.token(i);
        auto id = base.id_of(t);
        if (id && !base.is_special_id(*id)) tokens.insert(t);
    }
    const double rate = target_non_special == 0
                            ? 0.0
                            : static_cast<double>(tokens.size()) /
                                  static_cast<double>(target_non_special);
    return {std::move(tokens), rate};
}

double unk_rate(const Vocabulary& target, const Vocabulary& base) {
    std::size_t total = 0;
    std::size_t unks = 0;
    for (std::size_t i = target.num_specials(); i < target.size(); ++i) {
        ++total;
        if (tokenize(base, surface_form(target.token(i))).has_unk()) ++unks;
    }
    return total == 0 ? 0.0 : static_cast<double>(unks) / static_cast<double>(total);
}

OverlapGrouping group_overlap_tokens(const std::set<std::string>& tokens) {
    OverlapGrouping g;
    for (const auto& token : tokens) {
        const auto cps = uni::decode_utf8(surface_form(token));
        bool has_digit = false;
        bool has_latin = false;
        for (char32_t cp : cps) {
            has_digit |= uni::is_digit(cp);
            has_latin |= uni::is_latin(cp);
        }
        if (has_digit) {
            ++g.numbers;
        } else if (cps.size() == 1) {
            if (has_latin)
                ++g.latin_char;
            else
                ++g.other_char;
        } else if (has_latin) {
            ++g.latin_subword;
        } else {
            ++g.other_subword;
        }
    }
    return g;
}

OverlapReport analyze_overlap(const Vocabulary& target, const Vocabulary& base) {
    OverlapReport r;
    auto [tokens, rate] = lexical_overlap(target, base);
    r.overlap_tokens = std::move(tokens);
    r.lex_overlap_rate = rate;
    r.unk_rate = unk_rate(target, base);
    r.grouping = group_overlap_tokens(r.overlap_tokens);
    return r;
}

CorrelationReport correlation_report(const std::vector<LanguageMetricsRow>& rows) {
    if (rows.size() < 2)
        throw DataError("correlation_report: need at least two language rows");
    std::vector<double> unk, lex, score;
    unk.reserve(rows.size());
    lex.reserve(rows.size());
    score.reserve(rows.size());
    for (const auto& r : rows) {
        unk.push_back(r.unk_rate);
        lex.push_back(r.lex_overlap_rate);
        score.push_back(r.score);
    }
    CorrelationReport rep;
    rep.r_lex = pearson_correlation(lex, score);
    rep.r_unk = pearson_correlation(unk, score);
    return rep;
}

namespace {

double parse_double_field(std::string_view field, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw DataError("metrics TSV: bad numeric field '" + std::string(field) +
                        "' on line " + std::to_string(line_no));
    return v;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t tab = line.find('\t', pos);
        if (tab == std::string_view::npos) {
            out.push_back(line.substr(pos));
            return out;
        }
        out.push_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
}

} // namespace

std::vector<LanguageMetricsRow> read_metrics_tsv(std::istream& in) {
    std::vector<LanguageMetricsRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_tabs(line);
        if (!saw_header) {
            if (fields.size() < 4 || fields[0] != "lang")
                throw DataError("metrics TSV: missing header row 'lang\\tunk_rate\\t"
                                "lex_overlap_rate\\tscore'");
            saw_header = true;
            continue;
        }
        if (fields.size() < 4)
            throw DataError("metrics TSV: expected 4 fields on line " + std::to_string(line_no));
        LanguageMetricsRow r;
        r.language = std::string(fields[0]);
        r.unk_rate = parse_double_field(fields[1], line_no);
        r.lex_overlap_rate = parse_double_field(fields[2], line_no);
        r.score = parse_double_field(fields[3], line_no);
        rows.push_back(std::move(r));
    }
    if (!saw_header) throw DataError("metrics TSV: empty file");
    return rows;
}

std::vector<LanguageMetricsRow> load_metrics_tsv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open metrics TSV: " + path);
    return read_metrics_tsv(f);
}

void write_metrics_tsv(std::ostream& out, const std::vector<LanguageMetricsRow>& rows) {
    out << "lang\tunk_rate\tlex_overlap_rate\tscore\n";
    char buf[64];
    auto fmt = [&](double v) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, ptr);
    };
    for (const auto& r : rows)
        out << r.language << '\t' << fmt(r.unk_rate) << '\t' << fmt(r.lex_overlap_rate) << '\t'
            << fmt(r.score) << '\n';
}

} // namespace lexforge
