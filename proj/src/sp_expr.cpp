#include "chromred/sp_expr.hpp"

#include <cctype>
#include <vector>

#include "chromred/error.hpp"

namespace chromred {

namespace {

std::uint64_t mix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

SpExpr SpExpr::edge()
{
    static const SpExpr e(std::make_shared<const Node>(Node{Kind::Edge, 1, mix(1), nullptr}));
    return e;
}

SpExpr SpExpr::make(Kind k, const SpExpr& a, const SpExpr& b)
{
    std::uint64_t h = mix(mix(static_cast<std::uint64_t>(k) + 2) ^ a.hash());
    h = mix(h ^ (b.hash() * 31));
    return SpExpr(std::make_shared<const Node>(
        Node{k, a.leaf_count() + b.leaf_count(), h, std::make_unique<std::pair<SpExpr, SpExpr>>(a, b)}));
}

SpExpr SpExpr::series(const SpExpr& a, const SpExpr& b)
{
    return make(Kind::Series, a, b);
}

SpExpr SpExpr::parallel(const SpExpr& a, const SpExpr& b)
{
    return make(Kind::Parallel, a, b);
}

bool operator==(const SpExpr& a, const SpExpr& b)
{
    if (a.node_ == b.node_)
        return true;
    if (a.kind() != b.kind() || a.hash() != b.hash() || a.leaf_count() != b.leaf_count())
        return false;
    if (a.kind() == SpExpr::Kind::Edge)
        return true;
    return a.left() == b.left() && a.right() == b.right();
}

namespace {

SpExpr power(const SpExpr& a, std::uint64_t n, SpExpr (*join)(const SpExpr&, const SpExpr&))
{
    if (n == 0)
        throw PreconditionError("power of a gadget needs n >= 1");
    // Balanced halves, sharing the repeated half.
    if (n == 1)
        return a;
    SpExpr half = power(a, n / 2, join);
    SpExpr both = join(half, half);
    return n % 2 ? join(both, a) : both;
}

} // namespace

SpExpr series_power(const SpExpr& a, std::uint64_t n)
{
    return power(a, n, &SpExpr::series);
}

SpExpr parallel_power(const SpExpr& a, std::uint64_t n)
{
    return power(a, n, &SpExpr::parallel);
}

SpExpr parse_sp(std::string_view text)
{
    // Each open frame remembers its operator and the children read so far.
    struct Frame {
        char op;
        std::vector<SpExpr> kids;
    };
    std::vector<Frame> stack;
    std::vector<SpExpr> done;
    auto fail = [&](const std::string& why) -> ParseError {
        return ParseError("series-parallel expression: " + why);
    };
    auto push_value = [&](SpExpr v) {
        if (stack.empty())
            done.push_back(std::move(v));
        else
            stack.back().kids.push_back(std::move(v));
    };

    std::size_t k = 0;
    while (k < text.size()) {
        char c = text[k];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++k;
        } else if (c == '(') {
            ++k;
            while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k])))
                ++k;
            if (k >= text.size() || (text[k] != 'S' && text[k] != 'P'))
                throw fail("expected S or P after '('");
            stack.push_back({text[k], {}});
            ++k;
        } else if (c == ')') {
            if (stack.empty())
                throw fail("unbalanced ')'");
            Frame f = std::move(stack.back());
            stack.pop_back();
            if (f.kids.size() != 2)
                throw fail("S and P take exactly two operands");
            push_value(f.op == 'S' ? SpExpr::series(f.kids[0], f.kids[1])
                                   : SpExpr::parallel(f.kids[0], f.kids[1]));
            ++k;
        } else if (c == 'e') {
            push_value(SpExpr::edge());
            ++k;
        } else {
            throw fail(std::string("unexpected character '") + c + "'");
        }
    }
    if (!stack.empty())
        throw fail("unbalanced '('");
    if (done.size() != 1)
        throw fail("expected exactly one expression");
    return done.front();
}

std::string to_string(const SpExpr& x)
{
    std::string out;
    // Work items: an expression to print, or a literal to emit.
    struct Item {
        const SpExpr* expr;
        const char* text;
    };
    std::vector<Item> todo{{&x, nullptr}};
    while (!todo.empty()) {
        Item it = todo.back();
        todo.pop_back();
        if (it.text) {
            out += it.text;
            continue;
        }
        const SpExpr& e = *it.expr;
        if (e.kind() == SpExpr::Kind::Edge) {
            out += 'e';
            continue;
        }
        out += e.kind() == SpExpr::Kind::Series ? "(S " : "(P ";
        todo.push_back({nullptr, ")"});
        todo.push_back({&e.right(), nullptr});
        todo.push_back({nullptr, " "});
        todo.push_back({&e.left(), nullptr});
    }
    return out;
}

TwoTerminalGraph flatten(const SpExpr& x)
{
    TwoTerminalGraph h;
    h.graph = MultiGraph(2);
    h.s = 0;
    h.t = 1;
    struct Item {
        const SpExpr* expr;
        VertexId s, t;
    };
    std::vector<Item> todo{{&x, 0, 1}};
    while (!todo.empty()) {
        Item it = todo.back();
        todo.pop_back();
        const SpExpr& e = *it.expr;
        switch (e.kind()) {
        case SpExpr::Kind::Edge:
            h.graph.add_edge(it.s, it.t);
            break;
        case SpExpr::Kind::Series: {
            VertexId mid = h.graph.add_vertex();
            todo.push_back({&e.right(), mid, it.t});
            todo.push_back({&e.left(), it.s, mid});
            break;
        }
        case SpExpr::Kind::Parallel:
            todo.push_back({&e.right(), it.s, it.t});
            todo.push_back({&e.left(), it.s, it.t});
            break;
        }
    }
    return h;
}

} // namespace chromred
