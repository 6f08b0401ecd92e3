// Recursive-descent parser for set expressions; grammar in docs/set_grammar.ebnf.
#include "mixedsys/errors.hpp"
#include "mixedsys/index_set.hpp"

#include <cctype>
#include <limits>

namespace mixedsys {

namespace {

class SetParser {
public:
    explicit SetParser(std::string_view text) : text_(text) {}

    EventuallyPeriodicSet parse() {
        EventuallyPeriodicSet s = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return s;
    }

private:
    using Index = EventuallyPeriodicSet::Index;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("set expression '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    bool accept_word(std::string_view w) {
        skip_ws();
        if (text_.substr(pos_, w.size()) != w) return false;
        const std::size_t end = pos_ + w.size();
        if (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) return false;
        pos_ = end;
        return true;
    }

    Index number() {
        skip_ws();
        const std::size_t start = pos_;
        Index v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            const Index d = static_cast<Index>(text_[pos_] - '0');
            if (v > (std::numeric_limits<Index>::max() - d) / 10) fail("integer overflow");
            v = v * 10 + d;
            ++pos_;
        }
        if (pos_ == start) fail("expected an integer");
        return v;
    }

    Index positive() {
        const Index v = number();
        if (v == 0) fail("indices start at 1");
        return v;
    }

    EventuallyPeriodicSet expr() {
        EventuallyPeriodicSet s = term();
        while (accept('|')) s = set_union(s, term());
        return s;
    }

    EventuallyPeriodicSet term() {
        EventuallyPeriodicSet s = factor();
        while (accept('&')) s = set_intersection(s, factor());
        return s;
    }

    EventuallyPeriodicSet factor() {
        if (accept('~')) return complement(factor());
        EventuallyPeriodicSet s = atom();
        for (;;) {
            if (accept('+'))
                s = s.with(positive());
            else if (accept('-'))
                s = s.without(positive());
            else
                break;
        }
        return s;
    }

    EventuallyPeriodicSet atom() {
        if (accept('(')) {
            EventuallyPeriodicSet s = expr();
            expect(')');
            return s;
        }
        if (accept_word("all")) return EventuallyPeriodicSet::all();
        if (accept_word("none")) return EventuallyPeriodicSet::none();
        if (accept_word("res")) {
            expect('(');
            const Index p = positive();
            expect(';');
            std::vector<Index> rs{number()};
            while (accept(',')) rs.push_back(number());
            expect(')');
            return EventuallyPeriodicSet::residues(p, rs);
        }
        if (accept_word("fin")) {
            expect('(');
            std::vector<Index> ks;
            if (!accept(')')) {
                ks.push_back(positive());
                while (accept(',')) ks.push_back(positive());
                expect(')');
            }
            return EventuallyPeriodicSet::finite(ks);
        }
        fail("expected all, none, res(...), fin(...), '~' or '('");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

EventuallyPeriodicSet parse_index_set(std::string_view text) { return SetParser(text).parse(); }

} // namespace mixedsys
