#ifndef LEXFORGE_OVERLAP_HPP
#define LEXFORGE_OVERLAP_HPP

#include <cstddef>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "lexforge/vocab.hpp"

namespace lexforge {

// Table-3-style partition of an overlap token set. A token goes to the
// first matching category: any decimal digit -> numbers; single code
// point -> latin_char / other_char by script; longer -> latin_subword if
// it has at least one Latin character, else other_subword.
struct OverlapGrouping {
    std::size_t numbers = 0;
    std::size_t latin_char = 0;
    std::size_t latin_subword = 0;
    std::size_t other_char = 0;
    std::size_t other_subword = 0;

    std::size_t total() const {
        return numbers + latin_char + latin_subword + other_char + other_subword;
    }
};

struct OverlapReport {
    double unk_rate = 0.0;
    double lex_overlap_rate = 0.0;
    std::set<std::string> overlap_tokens;
    OverlapGrouping grouping;
};

struct LanguageMetricsRow {
    std::string language;
    double unk_rate = 0.0;
    double lex_overlap_rate = 0.0;
    double score = 0.0;
};

struct CorrelationReport {
    double r_lex = 0.0;
    double r_unk = 0.0;
};

// Exact string intersection of the two non-special token sets (the
// continuation prefix is significant). Rate is relative to the target's
// non-special entries.
std::pair<std::set<std::string>, double> lexical_overlap(const Vocabulary& target,
                                                         const Vocabulary& base);

// Fraction of non-special target tokens whose surface form cannot be
// composed from base pieces (tokenizing it with base yields an UNK).
double unk_rate(const Vocabulary& target, const Vocabulary& base);

// Classifies surface forms (prefix stripped before the category rules).
OverlapGrouping group_overlap_tokens(const std::set<std::string>& tokens);

OverlapReport analyze_overlap(const Vocabulary& target, const Vocabulary& base);

// r_lex = pearson(lex_overlap_rate, score), r_unk = pearson(unk_rate, score).
CorrelationReport correlation_report(const std::vector<LanguageMetricsRow>& rows);

// TSV with header "lang\tunk_rate\tlex_overlap_rate\tscore".
std::vector<LanguageMetricsRow> read_metrics_tsv(std::istream& in);
std::vector<LanguageMetricsRow> load_metrics_tsv(const std::string& path);
void write_metrics_tsv(std::ostream& out, const std::vector<LanguageMetricsRow>& rows);

} // namespace lexforge

#endif
