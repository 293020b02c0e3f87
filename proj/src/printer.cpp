#include "minsess/surface.hpp"

#include <sstream>

namespace minsess {

namespace {

void put_name(std::ostream& o, const Name& n) {
    if (n.dual) o << '~';
    switch (n.ns) {
    case NameSpace::User:
        break;
    case NameSpace::Prop:
        o << '%';
        break;
    case NameSpace::RecProp:
        o << '^';
        break;
    case NameSpace::Aux:
        o << '$';
        break;
    }
    o << n.base;
    if (n.index) o << '@' << n.index;
}

void put_type(std::ostream& o, const TypeRef& t);

void put_types(std::ostream& o, const std::vector<TypeRef>& ts) {
    for (size_t i = 0; i < ts.size(); ++i) {
        if (i) o << ", ";
        put_type(o, ts[i]);
    }
}

void put_type(std::ostream& o, const TypeRef& t) {
    switch (t->kind) {
    case TypeKind::End:
        o << "end";
        return;
    case TypeKind::Out:
    case TypeKind::In:
        o << (t->kind == TypeKind::Out ? "!(" : "?(");
        put_types(o, t->items);
        o << ");";
        put_type(o, t->cont);
        return;
    case TypeKind::Rec:
        o << "mu " << t->var << '.';
        put_type(o, t->cont);
        return;
    case TypeKind::Var:
        o << t->var;
        return;
    case TypeKind::Sel:
    case TypeKind::Bra:
        o << (t->kind == TypeKind::Sel ? "+{" : "&{");
        for (size_t i = 0; i < t->arms.size(); ++i) {
            if (i) o << ", ";
            o << t->arms[i].first << ": ";
            put_type(o, t->arms[i].second);
        }
        o << '}';
        return;
    case TypeKind::LinArrow:
    case TypeKind::ShArrow:
        o << (t->kind == TypeKind::LinArrow ? "lin(" : "sh(");
        put_types(o, t->items);
        o << ")->o";
        return;
    case TypeKind::Base:
        o << (t->base == BaseType::Int ? "int" : t->base == BaseType::Bool ? "bool" : "str");
        return;
    case TypeKind::NamePass:
        o << "<<";
        put_types(o, t->items);
        o << ">>";
        return;
    case TypeKind::Chan:
        o << "chan<";
        put_type(o, t->items[0]);
        o << '>';
        return;
    }
}

void put_string(std::ostream& o, const std::string& s) {
    o << '"';
    for (char c : s) {
        if (c == '"' || c == '\\') o << '\\';
        if (c == '\n') {
            o << "\\n";
            continue;
        }
        o << c;
    }
    o << '"';
}

void put_proc(std::ostream& o, const ProcRef& p);
void put_value(std::ostream& o, const ValueRef& v);

// Values at operand positions: anything with an operator gets parentheses.
void put_operand(std::ostream& o, const ValueRef& v) {
    bool wrap = v->kind == ValueKind::Abs ||
                (v->kind == ValueKind::Expr && v->op != Op::Len) ||
                (v->kind == ValueKind::Lit && std::holds_alternative<std::int64_t>(v->lit) &&
                 std::get<std::int64_t>(v->lit) < 0);
    if (wrap) o << '(';
    put_value(o, v);
    if (wrap) o << ')';
}

void put_value(std::ostream& o, const ValueRef& v) {
    switch (v->kind) {
    case ValueKind::Var:
        o << v->var;
        return;
    case ValueKind::Lit:
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, std::string>)
                    put_string(o, x);
                else if constexpr (std::is_same_v<T, bool>)
                    o << (x ? "true" : "false");
                else
                    o << x;
            },
            v->lit);
        return;
    case ValueKind::Chan:
        o << '&';
        put_name(o, v->chan);
        return;
    case ValueKind::Expr:
        switch (v->op) {
        case Op::Neg:
            o << '-';
            if (v->args[0]->kind == ValueKind::Var) {
                put_value(o, v->args[0]);
            } else {
                o << '(';
                put_value(o, v->args[0]);
                o << ')';
            }
            return;
        case Op::Len:
            o << "len(";
            put_value(o, v->args[0]);
            o << ')';
            return;
        case Op::Add:
            put_operand(o, v->args[0]);
            o << " + ";
            put_operand(o, v->args[1]);
            return;
        case Op::Eq:
            put_operand(o, v->args[0]);
            o << " = ";
            put_operand(o, v->args[1]);
            return;
        }
        return;
    case ValueKind::Abs:
        o << "\\(";
        for (size_t i = 0; i < v->params.size(); ++i) {
            if (i) o << ", ";
            put_name(o, v->params[i].name);
            o << ": ";
            put_type(o, v->params[i].type);
        }
        o << "). ";
        put_proc(o, v->body);
        return;
    }
}

// Continuations, restriction bodies and recursion bodies are atomic.
void put_atomic(std::ostream& o, const ProcRef& p) {
    if (p->kind == ProcKind::Par) {
        o << '(';
        put_proc(o, p);
        o << ')';
    } else {
        put_proc(o, p);
    }
}

void put_names(std::ostream& o, const std::vector<Name>& ns) {
    for (size_t i = 0; i < ns.size(); ++i) {
        if (i) o << ", ";
        put_name(o, ns[i]);
    }
}

void put_proc(std::ostream& o, const ProcRef& p) {
    switch (p->kind) {
    case ProcKind::Nil:
        o << '0';
        return;
    case ProcKind::Out:
        put_name(o, p->subject);
        o << "!<";
        for (size_t i = 0; i < p->payload.size(); ++i) {
            if (i) o << ", ";
            put_value(o, p->payload[i]);
        }
        o << ">.";
        put_atomic(o, p->cont);
        return;
    case ProcKind::In:
        put_name(o, p->subject);
        o << "?(";
        for (size_t i = 0; i < p->binders.size(); ++i) {
            if (i) o << ", ";
            o << p->binders[i];
        }
        o << ").";
        put_atomic(o, p->cont);
        return;
    case ProcKind::App:
        if (p->fun->kind == ValueKind::Var) {
            o << p->fun->var;
        } else {
            o << '(';
            put_value(o, p->fun);
            o << ')';
        }
        o << ' ';
        if (p->args.size() == 1) {
            put_name(o, p->args[0]);
        } else {
            o << '(';
            put_names(o, p->args);
            o << ')';
        }
        return;
    case ProcKind::Par:
        put_atomic(o, p->left);
        o << " | ";
        put_proc(o, p->right);
        return;
    case ProcKind::Res:
        o << "new (";
        put_name(o, p->binder);
        o << ": ";
        put_type(o, p->annot);
        o << ") ";
        put_atomic(o, p->cont);
        return;
    case ProcKind::Sel:
        put_name(o, p->subject);
        o << '<' << p->label << '.';
        put_atomic(o, p->cont);
        return;
    case ProcKind::Bra:
        put_name(o, p->subject);
        o << ">{";
        for (size_t i = 0; i < p->arms.size(); ++i) {
            if (i) o << ", ";
            o << p->arms[i].first << ": ";
            put_proc(o, p->arms[i].second);
        }
        o << '}';
        return;
    case ProcKind::OutNames:
        put_name(o, p->subject);
        o << "!<<";
        for (size_t i = 0; i < p->args.size(); ++i) {
            if (i) o << ", ";
            put_name(o, p->args[i]);
            o << ": ";
            put_type(o, p->types[i]);
        }
        o << ">>.";
        put_atomic(o, p->cont);
        return;
    case ProcKind::InNames:
        put_name(o, p->subject);
        o << "?((";
        for (size_t i = 0; i < p->binders.size(); ++i) {
            if (i) o << ", ";
            o << p->binders[i] << ": ";
            put_type(o, p->types[i]);
        }
        o << ")).";
        put_atomic(o, p->cont);
        return;
    case ProcKind::Rec:
        o << "rec " << p->recvar << ". ";
        put_atomic(o, p->cont);
        return;
    case ProcKind::RecVar:
        o << p->recvar;
        return;
    }
}

} // namespace

std::string print(const ProcRef& p) {
    std::ostringstream o;
    put_proc(o, p);
    return o.str();
}

std::string print(const TypeRef& t) {
    std::ostringstream o;
    put_type(o, t);
    return o.str();
}

std::string print(const ValueRef& v) {
    std::ostringstream o;
    put_value(o, v);
    return o.str();
}

std::string print(const Name& n) {
    std::ostringstream o;
    put_name(o, n);
    return o.str();
}

std::string print_file(const SourceFile& f) {
    std::ostringstream o;
    for (auto& [n, t] : f.aliases) o << "type " << n << " = " << print(t) << '\n';
    for (auto& [n, t] : f.free) o << "free " << print(n) << " : " << print(t) << '\n';
    o << print(f.entry) << '\n';
    return o.str();
}

} // namespace minsess
