#include "minsess/surface.hpp"

#include <cctype>
#include <map>

namespace minsess {

namespace {

const std::set<std::string> kKeywords = {"new", "rec", "mu",   "end",  "len",   "true", "false",
                                         "int", "bool", "str", "chan", "lin",   "sh",   "type",
                                         "free"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '#';
}

class Parser {
public:
    explicit Parser(const std::string& text) : src_(text) {}

    SourceFile file() {
        SourceFile f;
        for (;;) {
            if (keyword("type")) {
                std::string n = ident("type alias name");
                if (aliases_.count(n)) fail("duplicate type alias " + n);
                expect("=");
                TypeRef t = type();
                aliases_[n] = t;
                f.aliases.emplace_back(n, t);
            } else if (keyword("free")) {
                Name n = name();
                for (auto& [m, t] : f.free)
                    if (m == n) fail("duplicate free declaration " + print(n));
                expect(":");
                f.free.emplace_back(n, type());
            } else {
                break;
            }
        }
        f.entry = proc();
        end_of_input();
        return f;
    }

    ProcRef whole_proc() {
        ProcRef p = proc();
        end_of_input();
        return p;
    }

    TypeRef whole_type() {
        TypeRef t = type();
        end_of_input();
        return t;
    }

    ValueRef whole_value() {
        ValueRef v = value();
        end_of_input();
        return v;
    }

private:
    const std::string& src_;
    size_t pos_ = 0;
    std::map<std::string, TypeRef> aliases_;
    std::vector<std::string> tvars_;

    // -- lexical helpers ----------------------------------------------------

    [[noreturn]] void fail(const std::string& msg) const {
        int line = 1, col = 1;
        for (size_t i = 0; i < pos_ && i < src_.size(); ++i) {
            if (src_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(msg, line, col);
    }

    void ws() {
        for (;;) {
            while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            if (src_.compare(pos_, 2, "--") == 0) {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
                continue;
            }
            return;
        }
    }

    bool at_end() {
        ws();
        return pos_ >= src_.size();
    }

    char peek_char() {
        ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    bool looking_at(const std::string& s) {
        ws();
        return src_.compare(pos_, s.size(), s) == 0;
    }

    bool accept(const std::string& s) {
        if (!looking_at(s)) return false;
        pos_ += s.size();
        return true;
    }

    void expect(const std::string& s) {
        if (!accept(s)) {
            if (at_end()) fail("unexpected end of input, expected '" + s + "'");
            fail("expected '" + s + "'");
        }
    }

    bool looking_at_keyword(const std::string& kw) {
        ws();
        if (src_.compare(pos_, kw.size(), kw) != 0) return false;
        size_t after = pos_ + kw.size();
        return after >= src_.size() || !ident_char(src_[after]);
    }

    bool keyword(const std::string& kw) {
        if (!looking_at_keyword(kw)) return false;
        pos_ += kw.size();
        return true;
    }

    void end_of_input() {
        if (!at_end()) fail("unexpected trailing input");
    }

    std::string raw_ident(const char* what) {
        ws();
        if (pos_ >= src_.size()) fail(std::string("unexpected end of input, expected ") + what);
        if (!ident_start(src_[pos_])) fail(std::string("expected ") + what);
        size_t start = pos_;
        while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
        return src_.substr(start, pos_ - start);
    }

    std::string ident(const char* what) {
        size_t save = pos_;
        std::string s = raw_ident(what);
        if (kKeywords.count(s)) {
            pos_ = save;
            fail("keyword '" + s + "' used as " + what);
        }
        return s;
    }

    std::int64_t integer() {
        ws();
        size_t start = pos_;
        if (pos_ < src_.size() && src_[pos_] == '-') ++pos_;
        if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
            fail("expected integer");
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        try {
            return std::stoll(src_.substr(start, pos_ - start));
        } catch (const std::out_of_range&) {
            fail("integer literal out of range");
        }
    }

    bool name_start() {
        char c = peek_char();
        return ident_start(c) || c == '~' || c == '%' || c == '^' || c == '$';
    }

    Name name() {
        ws();
        Name n;
        if (accept("~")) n.dual = true;
        if (accept("%")) {
            n.ns = NameSpace::Prop;
        } else if (accept("^")) {
            n.ns = NameSpace::RecProp;
        } else if (accept("$")) {
            n.ns = NameSpace::Aux;
        }
        std::string prefix;
        if (n.ns == NameSpace::RecProp && accept("~")) prefix = "~";
        n.base = prefix + (n.ns == NameSpace::User ? ident("name") : raw_ident("name"));
        if (src_.compare(pos_, 1, "@") == 0) {
            ++pos_;
            std::int64_t k = integer();
            if (k < 1) fail("index must be positive");
            n.index = static_cast<int>(k);
        }
        return n;
    }

    // -- types ----------------------------------------------------------------

    std::vector<TypeRef> type_list(const std::string& close) {
        std::vector<TypeRef> out;
        if (accept(close)) return out;
        do {
            out.push_back(type());
        } while (accept(","));
        expect(close);
        return out;
    }

    TypeArms type_arms() {
        TypeArms arms;
        std::set<std::string> seen;
        if (accept("}")) return arms;
        do {
            std::string l = ident("label");
            if (!seen.insert(l).second) fail("duplicate label " + l);
            expect(":");
            arms.emplace_back(l, type());
        } while (accept(","));
        expect("}");
        return arms;
    }

    TypeRef type() {
        if (at_end()) fail("unexpected end of input, expected a type");
        if (keyword("end")) return t_end();
        if (keyword("int")) return t_int();
        if (keyword("bool")) return t_bool();
        if (keyword("str")) return t_str();
        if (keyword("mu")) {
            std::string v = ident("type variable");
            expect(".");
            tvars_.push_back(v);
            TypeRef body = type();
            tvars_.pop_back();
            TypeRef t = t_rec(v, body);
            if (!type_contractive(t)) fail("recursive type is not contractive");
            return t;
        }
        if (accept("!(")) {
            auto items = type_list(")");
            expect(";");
            return t_out(std::move(items), type());
        }
        if (accept("?(")) {
            auto items = type_list(")");
            expect(";");
            return t_in(std::move(items), type());
        }
        if (accept("+{")) return t_sel(type_arms());
        if (accept("&{")) return t_bra(type_arms());
        if (accept("<<")) return t_namepass(type_list(">>"));
        if (keyword("lin")) {
            expect("(");
            auto items = type_list(")");
            expect("->");
            expect_o();
            return t_lin(std::move(items));
        }
        if (keyword("sh")) {
            expect("(");
            auto items = type_list(")");
            expect("->");
            expect_o();
            return t_sh(std::move(items));
        }
        if (keyword("chan")) {
            expect("<");
            TypeRef u = type();
            expect(">");
            return t_chan(u);
        }
        size_t save = pos_;
        std::string id = ident("type");
        for (auto it = tvars_.rbegin(); it != tvars_.rend(); ++it)
            if (*it == id) return t_var(id);
        auto a = aliases_.find(id);
        if (a != aliases_.end()) return a->second;
        pos_ = save;
        ws();
        fail("unbound type alias " + id);
    }

    void expect_o() {
        ws();
        if (!(src_.compare(pos_, 1, "o") == 0 &&
              (pos_ + 1 >= src_.size() || !ident_char(src_[pos_ + 1]))))
            fail("expected 'o'");
        ++pos_;
    }

    // -- values ---------------------------------------------------------------

    ValueRef value() {
        ValueRef a = additive();
        if (looking_at("=") && !looking_at("=>")) {
            expect("=");
            ValueRef b = additive();
            return v_expr(Op::Eq, {a, b});
        }
        return a;
    }

    ValueRef additive() {
        ValueRef a = unary();
        while (accept("+")) a = v_expr(Op::Add, {a, unary()});
        return a;
    }

    ValueRef unary() {
        ws();
        if (looking_at("-")) {
            if (pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))
                return v_int(integer());
            expect("-");
            return v_expr(Op::Neg, {unary()});
        }
        return atom();
    }

    ValueRef atom() {
        if (at_end()) fail("unexpected end of input, expected a value");
        char c = peek_char();
        if (std::isdigit(static_cast<unsigned char>(c))) return v_int(integer());
        if (c == '"') return v_str(string_lit());
        if (keyword("true")) return v_bool(true);
        if (keyword("false")) return v_bool(false);
        if (keyword("len")) {
            expect("(");
            ValueRef v = value();
            expect(")");
            return v_expr(Op::Len, {v});
        }
        if (c == '\\') return abstraction();
        if (accept("&")) return v_chan(name());
        if (accept("(")) {
            ValueRef v = value();
            expect(")");
            return v;
        }
        return v_var(ident("value"));
    }

    std::string string_lit() {
        expect("\"");
        std::string out;
        for (;;) {
            if (pos_ >= src_.size()) fail("unterminated string literal");
            char c = src_[pos_++];
            if (c == '"') break;
            if (c == '\\') {
                if (pos_ >= src_.size()) fail("unterminated string literal");
                char e = src_[pos_++];
                out.push_back(e == 'n' ? '\n' : e);
            } else {
                out.push_back(c);
            }
        }
        return out;
    }

    ValueRef abstraction() {
        expect("\\");
        expect("(");
        std::vector<Param> params;
        if (!accept(")")) {
            do {
                Name n = name();
                for (auto& p : params)
                    if (p.name.same_binding(n)) fail("duplicate abstraction parameter");
                expect(":");
                params.push_back(Param{n, type()});
            } while (accept(","));
            expect(")");
        }
        expect(".");
        return v_abs(std::move(params), proc());
    }

    // -- processes ------------------------------------------------------------

    ProcRef proc() {
        std::vector<ProcRef> comps{atomic()};
        while (accept("|")) comps.push_back(atomic());
        return p_par(comps);
    }

    std::vector<Name> app_args() {
        if (accept("(")) {
            std::vector<Name> args;
            if (accept(")")) return args;
            do {
                args.push_back(name());
            } while (accept(","));
            expect(")");
            return args;
        }
        return {name()};
    }

    ProcRef atomic() {
        if (at_end()) fail("unexpected end of input, expected a process");
        ws();
        if (src_[pos_] == '0' && (pos_ + 1 >= src_.size() || !ident_char(src_[pos_ + 1]))) {
            ++pos_;
            return p_nil();
        }
        if (accept("(")) {
            if (peek_char() == '\\') {
                ValueRef f = abstraction();
                expect(")");
                return p_app(f, app_args());
            }
            ProcRef p = proc();
            expect(")");
            return p;
        }
        if (keyword("new")) {
            expect("(");
            Name b = name();
            expect(":");
            TypeRef t = type();
            expect(")");
            return p_res(b, t, atomic());
        }
        if (keyword("rec")) {
            std::string x = ident("recursion variable");
            expect(".");
            return p_rec(x, atomic());
        }
        if (!name_start()) fail("expected a process");
        Name n = name();
        if (accept("!<<")) {
            std::vector<Name> names;
            std::vector<TypeRef> types;
            if (!accept(">>")) {
                do {
                    names.push_back(name());
                    expect(":");
                    types.push_back(type());
                } while (accept(","));
                expect(">>");
            }
            expect(".");
            return p_out_names(n, std::move(names), std::move(types), atomic());
        }
        if (accept("!<")) {
            std::vector<ValueRef> payload;
            if (!accept(">")) {
                do {
                    payload.push_back(value());
                } while (accept(","));
                expect(">");
            }
            expect(".");
            return p_out(n, std::move(payload), atomic());
        }
        if (accept("?((")) {
            std::vector<std::string> binders;
            std::vector<TypeRef> types;
            if (!accept("))")) {
                do {
                    binders.push_back(ident("binder"));
                    expect(":");
                    types.push_back(type());
                } while (accept(","));
                expect("))");
            }
            expect(".");
            return p_in_names(n, std::move(binders), std::move(types), atomic());
        }
        if (accept("?(")) {
            std::vector<std::string> binders;
            if (!accept(")")) {
                do {
                    std::string b = ident("binder");
                    for (auto& o : binders)
                        if (o == b) fail("duplicate input binder " + b);
                    binders.push_back(b);
                } while (accept(","));
                expect(")");
            }
            expect(".");
            return p_in(n, std::move(binders), atomic());
        }
        if (accept(">{")) {
            ProcArms arms;
            std::set<std::string> seen;
            do {
                std::string l = ident("label");
                if (!seen.insert(l).second) fail("duplicate label " + l);
                expect(":");
                arms.emplace_back(l, proc());
            } while (accept(","));
            expect("}");
            return p_bra(n, std::move(arms));
        }
        if (accept("<")) {
            std::string l = ident("label");
            expect(".");
            return p_sel(n, l, atomic());
        }
        bool plain = !n.dual && n.ns == NameSpace::User && !n.indexed();
        if (plain && (name_start() || looking_at("("))) return p_app(v_var(n.base), app_args());
        if (plain) return p_recvar(n.base);
        fail("expected a prefix after name " + print(n));
    }
};

} // namespace

SourceFile parse_file(const std::string& text) {
    Parser p(text);
    return p.file();
}

ProcRef parse_proc(const std::string& text) {
    Parser p(text);
    return p.whole_proc();
}

TypeRef parse_type(const std::string& text) {
    Parser p(text);
    return p.whole_type();
}

ValueRef parse_value(const std::string& text) {
    Parser p(text);
    return p.whole_value();
}

} // namespace minsess
