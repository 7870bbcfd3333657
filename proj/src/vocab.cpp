#include "lexforge/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lexforge/common.hpp"
#include "lexforge/unicode.hpp"

namespace lexforge {

namespace {

constexpr std::size_t kMaxWordCodepoints = 100;

bool looks_like_special(std::string_view t) {
    if (t.size() < 3 || t.front() != '[' || t.back() != ']') return false;
    for (char c : t.substr(1, t.size() - 2)) {
        if (!(std::isupper(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    }
    return true;
}

} // namespace

const std::vector<std::string>& Vocabulary::default_specials() {
    static const std::vector<std::string> s = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
    return s;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::size_t num_specials)
    : tokens_(std::move(tokens)), num_specials_(num_specials) {
    if (num_specials_ > tokens_.size())
        throw DataError("vocabulary: special count exceeds token count");
    for (std::size_t i = 0; i < num_specials_; ++i) {
        if (!looks_like_special(tokens_[i]))
            throw DataError("vocabulary: special token '" + tokens_[i] +
                            "' does not match the [NAME] convention");
    }
    if (num_specials_ < tokens_.size() && looks_like_special(tokens_[num_specials_]))
        throw DataError("vocabulary: non-special token '" + tokens_[num_specials_] +
                        "' would be read back as a special");
    build_index();
}

void Vocabulary::build_index() {
    index_.clear();
    index_.reserve(tokens_.size());
    max_piece_cps_ = 0;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (tokens_[i].empty()) throw DataError("vocabulary: empty token at id " + std::to_string(i));
        auto [it, inserted] = index_.emplace(tokens_[i], i);
        if (!inserted) throw DataError("vocabulary: duplicate token '" + tokens_[i] + "'");
        if (i >= num_specials_)
            max_piece_cps_ = std::max(max_piece_cps_, uni::codepoint_count(tokens_[i]));
    }
}

std::optional<std::size_t> Vocabulary::id_of(std::string_view token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

bool Vocabulary::is_special(std::string_view token) const {
    auto id = id_of(token);
    return id && *id < num_specials_;
}

std::string Vocabulary::serialize() const {
    std::string out;
    for (const auto& t : tokens_) {
        out += t;
        out += '\n';
    }
    return out;
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open vocabulary file for writing: " + path);
    f << serialize();
    if (!f) throw DataError("failed writing vocabulary file: " + path);
}

Vocabulary Vocabulary::deserialize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        if (nl > pos) tokens.emplace_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    if (tokens.empty()) throw DataError("vocabulary file is empty");
    std::size_t num_specials = 0;
    while (num_specials < tokens.size() && looks_like_special(tokens[num_specials]))
        ++num_specials;
    return Vocabulary(std::move(tokens), num_specials);
}

Vocabulary Vocabulary::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open vocabulary file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return deserialize(ss.str());
}

std::vector<std::string> pretokenize(std::string_view text) {
    const auto cps = uni::decode_utf8(text);
    std::vector<std::string> words;
    std::vector<char32_t> current;
    auto flush = [&] {
        if (!current.empty()) {
            words.push_back(uni::encode_utf8(current));
            current.clear();
        }
    };
    for (char32_t cp : cps) {
        if (uni::is_whitespace(cp)) {
            flush();
        } else if (uni::is_punctuation(cp)) {
            flush();
            words.push_back(uni::encode_utf8({cp}));
        } else {
            current.push_back(cp);
        }
    }
    flush();
    return words;
}

namespace {

struct TrainerWord {
    std::vector<std::size_t> units;
    long long freq = 0;
};

struct PairStats {
    // pair of unit ids -> total weighted count
    std::map<std::pair<std::size_t, std::size_t>, long long> counts;
    // pair -> word ids currently containing it
    std::map<std::pair<std::size_t, std::size_t>, std::set<std::size_t>> where;

    void add_word(const TrainerWord& w, std::size_t wid) {
        for (std::size_t i = 0; i + 1 < w.units.size(); ++i) {
            const auto key = std::make_pair(w.units[i], w.units[i + 1]);
            counts[key] += w.freq;
            where[key].insert(wid);
        }
    }
    void remove_word(const TrainerWord& w, std::size_t wid) {
        for (std::size_t i = 0; i + 1 < w.units.size(); ++i) {
            const auto key = std::make_pair(w.units[i], w.units[i + 1]);
            auto it = counts.find(key);
            it->second -= w.freq;
            if (it->second <= 0) counts.erase(it);
            auto wit = where.find(key);
            wit->second.erase(wid);
            if (wit->second.empty()) where.erase(wit);
        }
    }
};

} // namespace

Vocabulary train_wordpiece(std::string_view corpus, std::size_t target_size,
                           const std::vector<std::string>& specials) {
    std::vector<std::string> words = pretokenize(corpus);
    if (words.empty()) throw DataError("train_wordpiece: empty corpus");

    std::map<std::string, long long> word_freq;
    for (auto& w : words) ++word_freq[w];

    // Intern unit strings.
    std::vector<std::string> unit_str;
    std::unordered_map<std::string, std::size_t> unit_id;
    auto intern = [&](std::string s) {
        auto it = unit_id.find(s);
        if (it != unit_id.end()) return it->second;
        const std::size_t id = unit_str.size();
        unit_id.emplace(s, id);
        unit_str.push_back(std::move(s));
        return id;
    };

    std::vector<TrainerWord> tw;
    tw.reserve(word_freq.size());
    std::set<std::size_t> alphabet;
    for (const auto& [word, freq] : word_freq) {
        const auto cps = uni::decode_utf8(word);
        TrainerWord w;
        w.freq = freq;
        for (std::size_t i = 0; i < cps.size(); ++i) {
            std::string u = i == 0 ? "" : std::string(Vocabulary::kContinuation);
            u += uni::encode_utf8({cps[i]});
            const std::size_t id = intern(std::move(u));
            w.units.push_back(id);
            alphabet.insert(id);
        }
        tw.push_back(std::move(w));
    }

    const std::size_t floor_size = specials.size() + alphabet.size();
    if (target_size < floor_size)
        throw DataError("train_wordpiece: target_size " + std::to_string(target_size) +
                        " cannot hold " + std::to_string(specials.size()) + " specials + " +
                        std::to_string(alphabet.size()) + " alphabet pieces");

    std::vector<long long> unit_count(unit_str.size(), 0);
    PairStats pairs;
    for (std::size_t wid = 0; wid < tw.size(); ++wid) {
        for (std::size_t u : tw[wid].units) unit_count[u] += tw[wid].freq;
        pairs.add_word(tw[wid], wid);
    }

    std::vector<std::size_t> merged_units; // in merge order
    std::size_t vocab_size = floor_size;

    while (vocab_size < target_size && !pairs.counts.empty()) {
        // Pick the best-scoring pair; ties by merged string, then left.
        bool have_best = false;
        std::pair<std::size_t, std::size_t> best_key{};
        double best_score = 0.0;
        std::string best_merged;
        for (const auto& [key, cnt] : pairs.counts) {
            const double score = static_cast<double>(cnt) /
                                 (static_cast<double>(unit_count[key.first]) *
                                  static_cast<double>(unit_count[key.second]));
            std::string merged = unit_str[key.first];
            merged += surface_form(unit_str[key.second]);
            if (!have_best || score > best_score ||
                (score == best_score &&
                 (merged < best_merged ||
                  (merged == best_merged && unit_str[key.first] < unit_str[best_key.first])))) {
                have_best = true;
                best_key = key;
                best_score = score;
                best_merged = std::move(merged);
            }
        }
        if (!have_best) break;

        // Distinct pairs can merge to the same string (e.g. (a,##bc) after
        // (ab,##c)); reuse the unit and do not grow the vocabulary again.
        const bool already_known = unit_id.contains(best_merged);
        const std::size_t merged_id = intern(best_merged);
        if (merged_id == unit_count.size()) unit_count.push_back(0);
        if (!already_known) {
            merged_units.push_back(merged_id);
            ++vocab_size;
        }

        // Rewrite every word containing the pair; stats updated by
        // removing the old form and adding the new one.
        const auto affected = pairs.where[best_key]; // copy: mutation below
        for (std::size_t wid : affected) {
            TrainerWord& w = tw[wid];
            pairs.remove_word(w, wid);
            for (std::size_t u : w.units) unit_count[u] -= w.freq;

            std::vector<std::size_t> rewritten;
            rewritten.reserve(w.units.size());
            for (std::size_t i = 0; i < w.units.size();) {
                if (i + 1 < w.units.size() && w.units[i] == best_key.first &&
                    w.units[i + 1] == best_key.second) {
                    rewritten.push_back(merged_id);
                    i += 2;
                } else {
                    rewritten.push_back(w.units[i]);
                    ++i;
                }
            }
            w.units = std::move(rewritten);

            for (std::size_t u : w.units) unit_count[u] += w.freq;
            pairs.add_word(w, wid);
        }
    }

    std::vector<std::string> tokens = specials;
    for (std::size_t id : alphabet) tokens.push_back(unit_str[id]); // set order = sorted ids...
    // ...but ids follow first-seen order; sort the alphabet lexicographically
    // so the layout is independent of corpus iteration order.
    std::sort(tokens.begin() + static_cast<std::ptrdiff_t>(specials.size()), tokens.end());
    for (std::size_t id : merged_units) tokens.push_back(unit_str[id]);

    return Vocabulary(std::move(tokens), specials.size());
}

Vocabulary train_wordpiece(std::istream& corpus, std::size_t target_size,
                           const std::vector<std::string>& specials) {
    std::stringstream ss;
    ss << corpus.rdbuf();
    return train_wordpiece(std::string_view(ss.str()), target_size, specials);
}

TokenizerOutput tokenize(const Vocabulary& vocab, std::string_view word) {
    if (word.empty()) throw std::invalid_argument("tokenize: empty word");
    const auto cps = uni::decode_utf8(word);
    for (char32_t cp : cps)
        if (uni::is_whitespace(cp))
            throw std::invalid_argument("tokenize: word contains whitespace");

    TokenizerOutput out;
    if (cps.size() > kMaxWordCodepoints) {
        out.tokens.emplace_back(Vocabulary::kUnk);
        out.unk_positions.push_back(0);
        return out;
    }

    const std::size_t n = cps.size();
    std::size_t cursor = 0;
    while (cursor < n) {
        const std::size_t window = std::min(vocab.max_piece_codepoints(), n - cursor);
        std::size_t match_len = 0;
        std::string match;
        std::string candidate;
        for (std::size_t len = window; len >= 1; --len) {
            candidate = cursor == 0 ? "" : std::string(Vocabulary::kContinuation);
            candidate += uni::encode_utf8({cps.begin() + static_cast<std::ptrdiff_t>(cursor),
                                           cps.begin() + static_cast<std::ptrdiff_t>(cursor + len)});
            auto id = vocab.id_of(candidate);
            if (id && !vocab.is_special_id(*id)) {
                match_len = len;
                match = std::move(candidate);
                break;
            }
        }
        if (match_len == 0) {
            out.tokens.clear();
            out.unk_positions.clear();
            out.tokens.emplace_back(Vocabulary::kUnk);
            out.unk_positions.push_back(0);
            return out;
        }
        out.tokens.push_back(std::move(match));
        cursor += match_len;
    }
    return out;
}

std::string detokenize(const std::vector<std::string>& tokens) {
    if (tokens.empty()) throw DataError("detokenize: empty token sequence");
    std::string out;
    for (const auto& t : tokens) {
        if (t == Vocabulary::kUnk) throw DataError("detokenize: [UNK] cannot be detokenized");
        out += surface_form(t);
    }
    return out;
}

std::string_view surface_form(std::string_view token) {
    if (token.starts_with(Vocabulary::kContinuation))
        token.remove_prefix(Vocabulary::kContinuation.size());
    return token;
}

} // namespace lexforge
