#include "tensorlint/types.hpp"

#include <algorithm>
#include <cctype>
#include <map>

namespace tensorlint::types {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

TypePtr make(PyType t) { return std::make_shared<const PyType>(std::move(t)); }

}  // namespace

TypePtr make_top() {
    static const TypePtr top = make(PyType{TopType{}});
    return top;
}
TypePtr make_label(std::string label) { return make(PyType{LabelType{std::move(label)}}); }
TypePtr make_tensor(std::vector<Dim> dims, TypePtr element) {
    return make(PyType{TensorType{std::move(dims), std::move(element)}});
}
TypePtr make_tensor(TensorType t) { return make(PyType{std::move(t)}); }
TypePtr make_record(std::vector<std::pair<std::string, TypePtr>> fields) {
    return make(PyType{RecordType{std::move(fields)}});
}
TypePtr make_function(std::vector<std::pair<std::string, TypePtr>> params, TypePtr result) {
    return make(PyType{FunctionType{std::move(params), std::move(result)}});
}

bool is_top(const PyType& t) { return std::holds_alternative<TopType>(t.v); }
const TensorType* as_tensor(const PyType& t) { return std::get_if<TensorType>(&t.v); }
const RecordType* as_record(const PyType& t) { return std::get_if<RecordType>(&t.v); }

TypePtr record_field(const PyType& t, const std::string& name) {
    if (const auto* r = as_record(t)) {
        for (const auto& [n, ft] : r->fields) {
            if (n == name) return ft;
        }
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class TypeParser {
public:
    TypeParser(std::string_view text, bool allow_reserved) : text_(text), allow_reserved_(allow_reserved) {}

    TypePtr parse() {
        TypePtr t = type();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing text");
        return t;
    }

private:
    std::string_view text_;
    bool allow_reserved_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& message) const { throw TypeSyntaxError(pos_, message); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
    static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

    bool at_ident() {
        skip_ws();
        if (pos_ >= text_.size()) return false;
        char c = text_[pos_];
        return ident_start(c) || (c == '?' && allow_reserved_);
    }

    std::string ident() {
        skip_ws();
        size_t start = pos_;
        if (pos_ < text_.size() && text_[pos_] == '?') {
            if (!allow_reserved_) fail("labels starting with '?' are reserved");
            ++pos_;
            while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
            if (pos_ == start + 1) fail("expected a label after '?'");
            return std::string(text_.substr(start, pos_ - start));
        }
        if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail("expected an identifier");
        while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    bool at_int() {
        skip_ws();
        return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
    }

    std::int64_t integer() {
        skip_ws();
        size_t start = pos_;
        std::int64_t value = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            if (value > (INT64_MAX - 9) / 10) fail("integer too large");
            value = value * 10 + (text_[pos_] - '0');
            ++pos_;
        }
        if (pos_ == start) fail("expected an integer");
        return value;
    }

    std::vector<std::pair<std::string, TypePtr>> fields(char close, bool allow_empty) {
        std::vector<std::pair<std::string, TypePtr>> out;
        if (allow_empty && accept(close)) return out;
        do {
            size_t at = pos_;
            std::string name = ident();
            for (const auto& [n, _] : out) {
                if (n == name) throw TypeSyntaxError(at, "duplicate field '" + name + "'");
            }
            expect(':');
            out.emplace_back(name, type());
        } while (accept(','));
        expect(close);
        return out;
    }

    TypePtr type() {
        if (accept('{')) return make_record(fields('}', false));
        if (accept('(')) {
            auto params = fields(')', true);
            skip_ws();
            if (text_.substr(pos_, 2) != "->") fail("expected '->'");
            pos_ += 2;
            return make_function(std::move(params), type());
        }
        std::string name = ident();
        if (name == "tensor" && peek('[')) return tensor();
        if (name == "top") return make_top();
        return make_label(std::move(name));
    }

    TypePtr tensor() {
        expect('[');
        std::vector<Dim> dims;
        do {
            dims.push_back(dim());
        } while (accept(','));
        expect(']');
        TypePtr element;
        skip_ws();
        size_t save = pos_;
        if (at_ident()) {
            std::string word = ident();
            if (word == "of") {
                element = type();
            } else {
                pos_ = save;
            }
        }
        if (!element) element = make_label("num");
        return make_tensor(std::move(dims), std::move(element));
    }

    Dim dim() {
        std::vector<Factor> fs;
        do {
            fs.push_back(factor());
        } while (accept('*'));
        return Dim(std::move(fs));
    }

    Factor factor() {
        if (at_int()) return Num{integer()};
        std::string label = ident();
        if (accept('(')) {
            std::int64_t n = integer();
            expect(')');
            return Labeled{std::move(label), n};
        }
        return Sym{std::move(label)};
    }
};

}  // namespace

TypePtr parse_type(std::string_view text, bool allow_reserved) {
    return normalize(TypeParser(text, allow_reserved).parse());
}

// ---------------------------------------------------------------------------
// printing

std::string to_string(const Factor& f) {
    return std::visit(Overloaded{
                          [](const Sym& s) { return s.label; },
                          [](const Num& n) { return std::to_string(n.n); },
                          [](const Labeled& l) { return l.label + "(" + std::to_string(l.n) + ")"; },
                      },
                      f);
}

std::string to_string(const Dim& d) {
    std::string s;
    for (size_t i = 0; i < d.factors.size(); ++i) {
        if (i) s += "*";
        s += to_string(d.factors[i]);
    }
    return s;
}

namespace {

std::string fields_text(const std::vector<std::pair<std::string, TypePtr>>& fields) {
    std::string s;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) s += ", ";
        s += fields[i].first + ": " + to_string(*fields[i].second);
    }
    return s;
}

}  // namespace

std::string to_string(const PyType& t) {
    return std::visit(Overloaded{
                          [](const RecordType& r) { return "{" + fields_text(r.fields) + "}"; },
                          [](const FunctionType& f) {
                              return "(" + fields_text(f.params) + ") -> " + to_string(*f.result);
                          },
                          [](const TensorType& tt) {
                              std::string s = "tensor[";
                              for (size_t i = 0; i < tt.dims.size(); ++i) {
                                  if (i) s += ", ";
                                  s += to_string(tt.dims[i]);
                              }
                              return s + "] of " + to_string(*tt.element);
                          },
                          [](const LabelType& l) { return l.label; },
                          [](const TopType&) { return std::string("top"); },
                      },
                      t.v);
}

// ---------------------------------------------------------------------------
// normalization and sizes

std::optional<std::int64_t> factor_size(const Factor& f) {
    if (const auto* n = std::get_if<Num>(&f)) return n->n;
    if (const auto* l = std::get_if<Labeled>(&f)) return l->n;
    return std::nullopt;
}

std::optional<std::int64_t> dim_size(const Dim& d) {
    std::int64_t total = 1;
    for (const auto& f : d.factors) {
        auto s = factor_size(f);
        if (!s) return std::nullopt;
        total *= *s;
    }
    return total;
}

std::optional<std::string> dim_label(const Dim& d) {
    if (d.factors.size() != 1) return std::nullopt;
    if (const auto* s = std::get_if<Sym>(&d.factors[0])) return s->label;
    if (const auto* l = std::get_if<Labeled>(&d.factors[0])) return l->label;
    return std::nullopt;
}

namespace {

Dim normalize_dim(const Dim& d) {
    if (d.factors.size() <= 1) return d;
    std::vector<Factor> kept;
    for (const auto& f : d.factors) {
        const auto* n = std::get_if<Num>(&f);
        if (n && n->n == 1) continue;
        kept.push_back(f);
    }
    if (kept.empty()) return Dim(Num{1});
    return Dim(std::move(kept));
}

}  // namespace

TypePtr normalize(const TypePtr& t) {
    return std::visit(Overloaded{
                          [&](const RecordType& r) {
                              std::vector<std::pair<std::string, TypePtr>> fields;
                              for (const auto& [n, ft] : r.fields) fields.emplace_back(n, normalize(ft));
                              std::sort(fields.begin(), fields.end(),
                                        [](const auto& a, const auto& b) { return a.first < b.first; });
                              return make_record(std::move(fields));
                          },
                          [&](const FunctionType& f) {
                              std::vector<std::pair<std::string, TypePtr>> params;
                              for (const auto& [n, pt] : f.params) params.emplace_back(n, normalize(pt));
                              return make_function(std::move(params), normalize(f.result));
                          },
                          [&](const TensorType& tt) {
                              std::vector<Dim> dims;
                              for (const auto& d : tt.dims) dims.push_back(normalize_dim(d));
                              TypePtr element = normalize(tt.element);
                              if (const auto* inner = as_tensor(*element)) {
                                  dims.insert(dims.end(), inner->dims.begin(), inner->dims.end());
                                  element = inner->element;
                              }
                              return make_tensor(std::move(dims), std::move(element));
                          },
                          [&](const LabelType&) { return t; },
                          [&](const TopType&) { return t; },
                      },
                      t->v);
}

std::string canonical(const TypePtr& t) { return to_string(*normalize(t)); }

bool type_equal(const TypePtr& a, const TypePtr& b) { return canonical(a) == canonical(b); }

// ---------------------------------------------------------------------------
// shape rules

const char* to_string(ShapeErrorKind kind) {
    switch (kind) {
        case ShapeErrorKind::SizeMismatch: return "SizeMismatch";
        case ShapeErrorKind::InvalidFactorization: return "InvalidFactorization";
        case ShapeErrorKind::MultipleWildcards: return "MultipleWildcards";
        case ShapeErrorKind::WildcardUnresolvable: return "WildcardUnresolvable";
        case ShapeErrorKind::RankError: return "RankError";
        case ShapeErrorKind::LabelError: return "LabelError";
        case ShapeErrorKind::ElementNotNumeric: return "ElementNotNumeric";
        case ShapeErrorKind::PlaceholderRankZero: return "PlaceholderRankZero";
    }
    return "?";
}

namespace {

std::string shape_text(const Shape& shape) {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += shape[i] ? std::to_string(*shape[i]) : "None";
    }
    return s + "]";
}

std::string type_text(const TensorType& t) { return to_string(PyType{t}); }

bool is_wildcard(const std::optional<std::int64_t>& e) { return !e || *e == -1; }

/// Multiplies with saturation so oversized products compare as "too big".
std::int64_t mul_sat(std::int64_t a, std::int64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > INT64_MAX / b) return INT64_MAX;
    return a * b;
}

Dim group_dim(std::vector<Factor> group) {
    if (group.empty()) return Dim(Num{1});
    if (group.size() == 1) return Dim(std::move(group[0]));
    std::vector<Factor> kept;
    for (auto& f : group) {
        auto* n = std::get_if<Num>(&f);
        if (n && n->n == 1) continue;
        kept.push_back(std::move(f));
    }
    if (kept.empty()) return Dim(Num{1});
    return Dim(std::move(kept));
}

class ReshapeSearch {
public:
    ReshapeSearch(const TensorType& src, std::vector<std::int64_t> targets, int wildcard)
        : targets_(std::move(targets)), wildcard_(wildcard) {
        for (const auto& d : src.dims) {
            boundary_.push_back(true);
            for (size_t i = 0; i < d.factors.size(); ++i) {
                if (i) boundary_.push_back(false);
                factors_.push_back(d.factors[i]);
                if (std::holds_alternative<Sym>(d.factors[i])) ++syms_total_;
            }
        }
        boundary_.push_back(true);
    }

    bool run() { return search(0, std::nullopt, 0); }

    std::vector<Dim> result() const { return out_; }
    size_t deepest_target() const { return deepest_; }
    size_t deepest_factor() const { return deepest_factor_; }
    const std::vector<Factor>& factors() const { return factors_; }

private:
    struct Candidate {
        size_t end;
        std::optional<std::int64_t> partial;
        std::vector<Factor> group;
        bool aligned;
    };

    std::vector<Factor> factors_;
    std::vector<bool> boundary_;
    std::vector<std::int64_t> targets_;
    int wildcard_;
    int syms_total_ = 0;
    std::vector<Dim> out_;
    size_t deepest_ = 0;
    size_t deepest_factor_ = 0;

    bool search(size_t i, std::optional<std::int64_t> partial, size_t j) {
        const size_t m = factors_.size();
        if (j == targets_.size()) return i == m && !partial;
        if (j >= deepest_) {
            deepest_ = j;
            deepest_factor_ = i;
        }
        const std::int64_t t = targets_[j];
        const bool wild = static_cast<int>(j) == wildcard_ && syms_total_ > 0;

        std::vector<Candidate> full, split;
        std::vector<Factor> group;
        std::int64_t p = 1;
        int syms = 0;
        for (size_t e = i; e < m; ++e) {
            const bool piece = e == i && partial.has_value();
            Factor element = piece ? Factor(Num{*partial}) : factors_[e];
            if (std::holds_alternative<Sym>(element)) {
                if (!wild) break;
                ++syms;
                group.push_back(element);
                if (syms == syms_total_ && p == t) {
                    full.push_back(Candidate{e + 1, std::nullopt, group, !partial && boundary_[i] && boundary_[e + 1]});
                }
                continue;
            }
            const std::int64_t s = *factor_size(element);
            const bool syms_done = !wild || syms == syms_total_;
            if (syms_done && mul_sat(p, s) == t) {
                auto g = group;
                g.push_back(element);
                full.push_back(Candidate{e + 1, std::nullopt, std::move(g), !partial && boundary_[i] && boundary_[e + 1]});
            }
            if (syms_done && std::holds_alternative<Num>(factors_[e]) && p > 0 && t % p == 0) {
                std::int64_t q = t / p;
                if (q >= 2 && s % q == 0 && s / q >= 2) {
                    auto g = group;
                    g.push_back(Num{q});
                    split.push_back(Candidate{e, s / q, std::move(g), false});
                }
            }
            p = mul_sat(p, s);
            group.push_back(std::move(element));
            if (t > 0 && p > t) break;
        }

        std::vector<Candidate> ordered;
        for (auto& c : full) {
            if (c.aligned) ordered.push_back(c);
        }
        for (auto& c : full) {
            if (!c.aligned) ordered.push_back(c);
        }
        for (auto& c : split) ordered.push_back(std::move(c));
        if (t == 1 && !wild) ordered.push_back(Candidate{i, partial, {}, false});

        for (auto& c : ordered) {
            out_.push_back(group_dim(c.group));
            if (search(c.end, c.partial, j + 1)) return true;
            out_.pop_back();
        }
        return false;
    }
};

}  // namespace

Outcome<TensorType> reshape_apply(const TensorType& src, const Shape& shape) {
    int wildcard = -1;
    std::int64_t others = 1;
    for (size_t i = 0; i < shape.size(); ++i) {
        if (is_wildcard(shape[i])) {
            if (wildcard >= 0) {
                return Outcome<TensorType>::failure(
                    {ShapeErrorKind::MultipleWildcards, "shape " + shape_text(shape) + " has more than one -1 entry", 0,
                     0, static_cast<int>(i) + 1, ""});
            }
            wildcard = static_cast<int>(i);
        }
    }
    for (size_t i = 0; i < shape.size(); ++i) {
        if (static_cast<int>(i) == wildcard) continue;
        if (*shape[i] < 0) {
            return Outcome<TensorType>::failure({ShapeErrorKind::SizeMismatch,
                                                 "shape " + shape_text(shape) + " has a negative entry", 0, *shape[i],
                                                 static_cast<int>(i) + 1, ""});
        }
        others = mul_sat(others, *shape[i]);
    }

    std::int64_t known = 1;
    std::string first_sym;
    int syms = 0;
    for (const auto& d : src.dims) {
        for (const auto& f : d.factors) {
            if (auto s = factor_size(f)) {
                known = mul_sat(known, *s);
            } else {
                if (!syms) first_sym = to_string(f);
                ++syms;
            }
        }
    }

    std::vector<std::int64_t> targets;
    for (const auto& e : shape) targets.push_back(e ? *e : -1);
    if (wildcard < 0) {
        if (syms > 0) {
            return Outcome<TensorType>::failure(
                {ShapeErrorKind::WildcardUnresolvable,
                 "symbolic dimension " + first_sym + " of " + type_text(src) + " needs a -1 entry in " + shape_text(shape),
                 0, 0, 0, first_sym});
        }
        if (known != others) {
            return Outcome<TensorType>::failure({ShapeErrorKind::SizeMismatch,
                                                 "cannot reshape " + type_text(src) + " with " +
                                                     std::to_string(known) + " elements to " + shape_text(shape) +
                                                     " with " + std::to_string(others),
                                                 known, others, 0, ""});
        }
    } else {
        if (others == 0) {
            return Outcome<TensorType>::failure({ShapeErrorKind::WildcardUnresolvable,
                                                 "-1 entry of " + shape_text(shape) + " is undetermined", 0, 0,
                                                 wildcard + 1, ""});
        }
        if (known % others != 0) {
            return Outcome<TensorType>::failure({ShapeErrorKind::SizeMismatch,
                                                 "cannot reshape " + type_text(src) + " with " +
                                                     std::to_string(known) + " known elements to " + shape_text(shape) +
                                                     ": " + std::to_string(others) + " does not divide it",
                                                 known, others, 0, ""});
        }
        targets[static_cast<size_t>(wildcard)] = known / others;
    }

    ReshapeSearch search(src, targets, wildcard);
    if (!search.run()) {
        size_t j = std::min(search.deepest_target(), shape.size() - 1);
        std::int64_t want = shape.empty() ? 0 : targets[j];
        std::string rest;
        const auto& fs = search.factors();
        for (size_t i = search.deepest_factor(); i < fs.size(); ++i) {
            if (!rest.empty()) rest += "*";
            rest += to_string(fs[i]);
        }
        std::string what = static_cast<int>(j) == wildcard ? "-1" : std::to_string(want);
        return Outcome<TensorType>::failure(
            {ShapeErrorKind::InvalidFactorization,
             "entry " + what + " of " + shape_text(shape) + " is not a valid factorization of " + type_text(src) +
                 (rest.empty() ? std::string(": no factors remain") : ": remaining factors are " + rest),
             static_cast<std::int64_t>(search.deepest_factor()), want, static_cast<int>(j) + 1, ""});
    }
    return Outcome<TensorType>::success(TensorType{search.result(), src.element});
}

namespace {

Outcome<TensorType> rank_error(const TensorType& input, size_t want, const std::string& api, bool at_least = false) {
    return Outcome<TensorType>::failure({ShapeErrorKind::RankError,
                                         api + " requires " + (at_least ? "at least " : "") + std::to_string(want) +
                                             " dimensions, got " + std::to_string(input.dims.size()) + " in " +
                                             type_text(input),
                                         static_cast<std::int64_t>(input.dims.size()), static_cast<std::int64_t>(want),
                                         0, ""});
}

std::optional<ShapeError> element_check(const TensorType& input, const CheckConfig& config, const std::string& api) {
    const PyType& e = *input.element;
    if (is_top(e)) return std::nullopt;
    if (const auto* l = std::get_if<LabelType>(&e.v); l && config.numeric.count(l->label)) return std::nullopt;
    std::string got = to_string(e);
    return ShapeError{ShapeErrorKind::ElementNotNumeric,
                      api + " requires a numeric element type, got " + got + " in " + type_text(input), 0, 0, 0, got};
}

std::string join(const std::set<std::string>& s) {
    std::string out;
    for (const auto& x : s) out += (out.empty() ? "" : "/") + x;
    return out;
}

/// A dimension without a label, or with a generated one, fits any role.
bool unlabeled(const Dim& d) {
    if (d.is_product()) return false;
    if (std::holds_alternative<Num>(d.factors[0])) return true;
    if (const auto* s = std::get_if<Sym>(&d.factors[0])) return !s->label.empty() && s->label[0] == '?';
    return false;
}

bool in_role(const Dim& d, const std::set<std::string>& aliases) {
    if (unlabeled(d)) return true;
    auto l = dim_label(d);
    return l && aliases.count(*l);
}

Outcome<TensorType> conv_check(const TensorType& input, const Count& filters, const CheckConfig& config,
                               const std::vector<const std::set<std::string>*>& roles, const std::string& api) {
    const size_t rank = roles.size() + 2;
    if (input.dims.size() != rank) return rank_error(input, rank, api);

    auto label_error = [&](size_t pos, const std::set<std::string>& wanted) {
        const Dim& d = input.dims[pos];
        std::string got = to_string(d);
        return Outcome<TensorType>::failure({ShapeErrorKind::LabelError,
                                             api + " expects dimension " + std::to_string(pos + 1) + " of " +
                                                 type_text(input) + " to be " + join(wanted) + ", got " + got,
                                             0, 0, static_cast<int>(pos + 1), got});
    };

    if (config.strict_hw_order) {
        for (size_t k = 0; k < roles.size(); ++k) {
            if (!in_role(input.dims[k + 1], *roles[k])) return label_error(k + 1, *roles[k]);
        }
    } else {
        std::vector<bool> used(roles.size(), false);
        for (size_t k = 0; k < roles.size(); ++k) {
            const Dim& d = input.dims[k + 1];
            if (unlabeled(d)) continue;
            bool matched = false;
            for (size_t r = 0; r < roles.size() && !matched; ++r) {
                if (!used[r] && in_role(d, *roles[r])) {
                    used[r] = true;
                    matched = true;
                }
            }
            if (!matched) return label_error(k + 1, *roles[k]);
        }
    }
    if (auto err = element_check(input, config, api)) return Outcome<TensorType>::failure(*err);

    TensorType out = input;
    if (config.filters_last) {
        out.dims.back() = filters.value ? Dim(Num{*filters.value})
                                        : Dim(Sym{filters.name.empty() ? "?filters" : filters.name});
    }
    return Outcome<TensorType>::success(std::move(out));
}

}  // namespace

Outcome<TensorType> conv2d_check(const TensorType& input, const Count& filters, const CheckConfig& config) {
    return conv_check(input, filters, config, {&config.height, &config.width}, "conv2d");
}

Outcome<TensorType> conv3d_check(const TensorType& input, const Count& filters, const CheckConfig& config) {
    return conv_check(input, filters, config, {&config.depth, &config.height, &config.width}, "conv3d");
}

Outcome<TensorType> placeholder_type(const Shape& shape, int& next_fresh, const std::string& element) {
    if (shape.empty()) {
        return Outcome<TensorType>::failure(
            {ShapeErrorKind::PlaceholderRankZero, "placeholder shape [] has no dimensions", 0, 0, 0, ""});
    }
    TensorType t;
    for (const auto& e : shape) {
        if (is_wildcard(e) || *e < 0) {
            t.dims.emplace_back(Sym{"?" + std::to_string(next_fresh++)});
        } else {
            t.dims.emplace_back(Num{*e});
        }
    }
    t.element = make_label(element);
    return Outcome<TensorType>::success(std::move(t));
}

Outcome<TensorType> pool2d_apply(const TensorType& input, std::optional<std::int64_t> pool,
                                 std::optional<std::int64_t> stride, const CheckConfig& config) {
    if (input.dims.size() != 4) return rank_error(input, 4, "max_pooling2d");
    if (auto err = element_check(input, config, "max_pooling2d")) return Outcome<TensorType>::failure(*err);
    std::optional<std::int64_t> step = stride ? stride : pool;
    Outcome<TensorType> out;
    TensorType t = input;
    if (step && *step > 0) {
        for (size_t k = 1; k <= 2; ++k) {
            Dim& d = t.dims[k];
            if (d.is_product()) continue;
            Factor& f = d.factors[0];
            auto size = factor_size(f);
            if (!size) continue;
            if (*size % *step != 0) {
                out.warnings.push_back("pooling dimension " + std::to_string(k + 1) + " of size " +
                                       std::to_string(*size) + " is not divisible by stride " + std::to_string(*step));
            }
            std::int64_t n = *size / *step;
            if (auto* l = std::get_if<Labeled>(&f)) {
                l->n = n;
            } else {
                f = Num{n};
            }
        }
    }
    out.value = std::move(t);
    return out;
}

Outcome<TensorType> flatten_apply(const TensorType& input) {
    if (input.dims.size() < 2) return rank_error(input, 2, "flatten", true);
    std::vector<Factor> rest;
    for (size_t k = 1; k < input.dims.size(); ++k) {
        for (const auto& f : input.dims[k].factors) rest.push_back(f);
    }
    return Outcome<TensorType>::success(TensorType{{input.dims[0], group_dim(std::move(rest))}, input.element});
}

Outcome<TensorType> dense_apply(const TensorType& input, const Count& units) {
    if (input.dims.size() != 2) return rank_error(input, 2, "dense");
    Dim out = units.value ? Dim(Num{*units.value}) : Dim(Sym{units.name.empty() ? "?units" : units.name});
    return Outcome<TensorType>::success(TensorType{{input.dims[0], std::move(out)}, input.element});
}

bool has_transfer(const std::string& tag) {
    static const std::set<std::string> tags{"reshape", "conv2d",  "conv3d",  "placeholder", "max_pooling2d",
                                            "flatten", "dense",   "dropout", "identity",    "opaque"};
    return tags.count(tag) > 0;
}

}  // namespace tensorlint::types
