#include "reshape_oracle.hpp"

#include <functional>
#include <vector>

namespace oracle {

namespace tt = tensorlint::types;

namespace {

struct Piece {
    tt::Factor factor;
    int origin;  // index of the source factor it came from
};

// Ordered factorizations of n into parts >= 2, including n itself.
std::vector<std::vector<std::int64_t>> factorizations(std::int64_t n) {
    std::vector<std::vector<std::int64_t>> out{{n}};
    for (std::int64_t d = 2; d < n; ++d) {
        if (n % d != 0 || n / d < 2) continue;
        for (auto& rest : factorizations(n / d)) {
            std::vector<std::int64_t> v{d};
            v.insert(v.end(), rest.begin(), rest.end());
            out.push_back(std::move(v));
        }
    }
    return out;
}

std::optional<std::int64_t> size_of(const tt::Factor& f) {
    if (auto* n = std::get_if<tt::Num>(&f)) return n->n;
    if (auto* l = std::get_if<tt::Labeled>(&f)) return l->n;
    return std::nullopt;
}

tt::Dim dim_of(const std::vector<Piece>& group) {
    if (group.empty()) return tt::Dim(tt::Num{1});
    if (group.size() == 1) return tt::Dim(group[0].factor);
    std::vector<tt::Factor> kept;
    for (const auto& p : group) {
        auto* n = std::get_if<tt::Num>(&p.factor);
        if (n && n->n == 1) continue;
        kept.push_back(p.factor);
    }
    if (kept.empty()) return tt::Dim(tt::Num{1});
    return tt::Dim(std::move(kept));
}

}  // namespace

ReshapeVerdict reshape(const tt::TensorType& src, const tt::Shape& shape) {
    ReshapeVerdict v;
    std::vector<tt::Factor> factors;
    for (const auto& d : src.dims)
        for (const auto& f : d.factors) factors.push_back(f);

    int wildcards = 0;
    int wildcard = -1;
    for (size_t i = 0; i < shape.size(); ++i)
        if (!shape[i] || *shape[i] == -1) {
            ++wildcards;
            wildcard = static_cast<int>(i);
        }
    if (wildcards > 1) {
        v.error = tt::ShapeErrorKind::MultipleWildcards;
        return v;
    }
    std::int64_t others = 1;
    for (size_t i = 0; i < shape.size(); ++i) {
        if (static_cast<int>(i) == wildcard) continue;
        if (*shape[i] < 0) {
            v.error = tt::ShapeErrorKind::SizeMismatch;
            return v;
        }
        others *= *shape[i];
    }
    std::int64_t known = 1;
    int syms = 0;
    for (const auto& f : factors) {
        if (auto s = size_of(f)) known *= *s;
        else ++syms;
    }
    std::vector<std::int64_t> targets;
    for (const auto& e : shape) targets.push_back(e ? *e : -1);
    if (wildcard < 0) {
        if (syms > 0) {
            v.error = tt::ShapeErrorKind::WildcardUnresolvable;
            return v;
        }
        if (known != others) {
            v.error = tt::ShapeErrorKind::SizeMismatch;
            return v;
        }
    } else {
        if (others == 0) {
            v.error = tt::ShapeErrorKind::WildcardUnresolvable;
            return v;
        }
        if (known % others != 0) {
            v.error = tt::ShapeErrorKind::SizeMismatch;
            return v;
        }
        targets[wildcard] = known / others;
    }

    // Every way of splitting each unlabeled Num factor.
    std::vector<std::vector<std::vector<Piece>>> options;
    for (size_t i = 0; i < factors.size(); ++i) {
        std::vector<std::vector<Piece>> opts;
        auto* n = std::get_if<tt::Num>(&factors[i]);
        if (n && n->n >= 4) {
            for (auto& parts : factorizations(n->n)) {
                std::vector<Piece> ps;
                for (auto p : parts) ps.push_back({tt::Num{p}, static_cast<int>(i)});
                opts.push_back(std::move(ps));
            }
        } else {
            opts.push_back({{factors[i], static_cast<int>(i)}});
        }
        options.push_back(std::move(opts));
    }

    std::vector<Piece> seq;
    std::vector<tt::Dim> out;
    std::function<void(size_t, size_t)> group = [&](size_t pos, size_t j) {
        if (j == targets.size()) {
            if (pos == seq.size()) {
                tt::TensorType t{out, src.element};
                v.results.insert(tt::canonical(tt::make_tensor(t)));
            }
            return;
        }
        const bool wild = static_cast<int>(j) == wildcard && syms > 0;
        for (size_t end = pos; end <= seq.size(); ++end) {
            std::vector<Piece> g(seq.begin() + pos, seq.begin() + end);
            bool ok = true;
            int gsyms = 0;
            std::int64_t p = 1;
            for (size_t a = 0; a < g.size(); ++a) {
                if (a && g[a].origin == g[a - 1].origin) ok = false;
                if (auto s = size_of(g[a].factor)) p *= *s;
                else ++gsyms;
            }
            if (!ok) continue;
            if (g.empty()) {
                if (wild || targets[j] != 1) continue;
            } else if (wild) {
                if (gsyms != syms || p != targets[j]) continue;
            } else {
                if (gsyms > 0 || p != targets[j]) continue;
            }
            out.push_back(dim_of(g));
            group(end, j + 1);
            out.pop_back();
        }
    };
    std::function<void(size_t)> expand = [&](size_t i) {
        if (i == options.size()) {
            group(0, 0);
            return;
        }
        for (const auto& opt : options[i]) {
            size_t mark = seq.size();
            seq.insert(seq.end(), opt.begin(), opt.end());
            expand(i + 1);
            seq.resize(mark);
        }
    };
    expand(0);
    if (v.results.empty()) v.error = tt::ShapeErrorKind::InvalidFactorization;
    return v;
}

}  // namespace oracle
