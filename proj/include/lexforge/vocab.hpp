#ifndef LEXFORGE_VOCAB_HPP
#define LEXFORGE_VOCAB_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexforge {

// Ordered subword vocabulary. Special tokens come first, in the order
// given at construction; a token's index is its id and is stable across
// save/load. Word-internal pieces carry the "##" continuation prefix.
//
// File format: UTF-8, one token per line, line index = id. On load the
// special set is recovered as the maximal leading run of tokens shaped
// like "[NAME]" (uppercase letters, digits, underscore), which every
// conventional special marker matches and no trained piece can (the
// pre-tokeniser splits brackets off as standalone characters).
class Vocabulary {
public:
    static constexpr std::string_view kContinuation = "##";
    static constexpr std::string_view kUnk = "[UNK]";

    // [PAD], [UNK], [CLS], [SEP], [MASK]
    static const std::vector<std::string>& default_specials();

    Vocabulary() = default;
    Vocabulary(std::vector<std::string> tokens, std::size_t num_specials);

    std::size_t size() const { return tokens_.size(); }
    std::size_t num_specials() const { return num_specials_; }
    const std::string& token(std::size_t id) const { return tokens_[id]; }
    const std::vector<std::string>& tokens() const { return tokens_; }

    std::optional<std::size_t> id_of(std::string_view token) const;
    bool contains(std::string_view token) const { return id_of(token).has_value(); }
    bool is_special(std::string_view token) const;
    bool is_special_id(std::size_t id) const { return id < num_specials_; }

    // Longest token length in code points; bounds the tokenizer's match window.
    std::size_t max_piece_codepoints() const { return max_piece_cps_; }

    std::string serialize() const;
    void save(const std::string& path) const;
    static Vocabulary deserialize(std::string_view text);
    static Vocabulary load(const std::string& path);

    bool operator==(const Vocabulary& o) const {
        return tokens_ == o.tokens_ && num_specials_ == o.num_specials_;
    }

private:
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const {
            return std::hash<std::string_view>{}(s);
        }
    };

    std::vector<std::string> tokens_;
    std::size_t num_specials_ = 0;
    std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
    std::size_t max_piece_cps_ = 0;

    void build_index();
};

struct TokenizerOutput {
    std::vector<std::string> tokens;
    std::vector<std::size_t> unk_positions;

    bool has_unk() const { return !unk_positions.empty(); }
};

// Trains a WordPiece vocabulary: all single-character pieces seen in the
// corpus (in the positional form they occur in: word-initial bare,
// word-internal "##"-prefixed) plus merges chosen greedily by the score
//   freq(pair) / (freq(left) * freq(right)),
// ties broken by the lexicographically smaller merged string, then left
// part. Stops at target_size or when no adjacent pair remains.
//
// Pre-tokenisation: words split on whitespace, punctuation characters
// split off as standalone words. Input must be valid UTF-8 and is
// otherwise taken as-is (callers are expected to supply NFC text; no
// normalisation is applied).
Vocabulary train_wordpiece(std::istream& corpus, std::size_t target_size,
                           const std::vector<std::string>& specials);
Vocabulary train_wordpiece(std::string_view corpus, std::size_t target_size,
                           const std::vector<std::string>& specials);

// Greedy longest-match-first segmentation of one whitespace-free word.
// Words longer than 100 code points, or with no matching piece at some
// cursor, map to a single [UNK].
TokenizerOutput tokenize(const Vocabulary& vocab, std::string_view word);

// Splits text into words exactly like the trainer does.
std::vector<std::string> pretokenize(std::string_view text);

// Concatenates pieces, stripping the continuation prefix. Inverse of
// tokenize for UNK-free output. Throws DataError on UNK or empty input.
std::string detokenize(const std::vector<std::string>& tokens);

// Surface form of a vocabulary entry: the token with any continuation
// prefix removed.
std::string_view surface_form(std::string_view token);

} // namespace lexforge

#endif
