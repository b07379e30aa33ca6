#include "fedlibre/util/xml.hpp"

#include "fedlibre/util/error.hpp"
#include "fedlibre/util/text.hpp"

#include <expat.h>

#include <memory>

namespace fedlibre::xml {

namespace {

constexpr char kNsSeparator = '\x01';

void split_name(const XML_Char* qualified, std::string& ns, std::string& local)
{
    std::string_view q(qualified);
    const auto pos = q.find(kNsSeparator);
    if (pos == std::string_view::npos) {
        ns.clear();
        local.assign(q);
    } else {
        ns.assign(q.substr(0, pos));
        local.assign(q.substr(pos + 1));
    }
}

struct Builder {
    XML_Parser parser = nullptr;
    std::vector<Element> stack;
    std::vector<NamespaceDecl> pending;
    std::vector<std::size_t> start_lengths;
    Element root;
    bool has_root = false;

    static void on_start(void* user, const XML_Char* name, const XML_Char** atts)
    {
        auto* self = static_cast<Builder*>(user);
        Element e;
        split_name(name, e.ns, e.name);
        for (int i = 0; atts[i]; i += 2) {
            Attribute a;
            split_name(atts[i], a.ns, a.name);
            a.value = atts[i + 1];
            e.attributes.push_back(std::move(a));
        }
        e.declarations = std::move(self->pending);
        self->pending.clear();
        e.begin = static_cast<std::size_t>(XML_GetCurrentByteIndex(self->parser));
        self->start_lengths.push_back(static_cast<std::size_t>(XML_GetCurrentByteCount(self->parser)));
        self->stack.push_back(std::move(e));
    }

    static void on_end(void* user, const XML_Char*)
    {
        auto* self = static_cast<Builder*>(user);
        Element e = std::move(self->stack.back());
        self->stack.pop_back();
        const auto index = static_cast<std::size_t>(XML_GetCurrentByteIndex(self->parser));
        const auto count = static_cast<std::size_t>(XML_GetCurrentByteCount(self->parser));
        const std::size_t start_len = self->start_lengths.back();
        self->start_lengths.pop_back();
        // An empty-element tag reports no bytes for its end event.
        e.end = count == 0 ? e.begin + start_len : index + count;
        if (self->stack.empty()) {
            self->root = std::move(e);
            self->has_root = true;
        } else {
            self->stack.back().children.push_back(std::move(e));
        }
    }

    static void on_text(void* user, const XML_Char* s, int len)
    {
        auto* self = static_cast<Builder*>(user);
        if (!self->stack.empty())
            self->stack.back().text.append(s, static_cast<std::size_t>(len));
    }

    static void on_ns_start(void* user, const XML_Char* prefix, const XML_Char* uri)
    {
        auto* self = static_cast<Builder*>(user);
        self->pending.push_back({prefix ? prefix : "", uri ? uri : ""});
    }
};

} // namespace

const Element* Element::child(std::string_view ns_uri, std::string_view local) const
{
    for (const auto& c : children) {
        if (c.is(ns_uri, local))
            return &c;
    }
    return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view ns_uri, std::string_view local) const
{
    std::vector<const Element*> out;
    for (const auto& c : children) {
        if (c.is(ns_uri, local))
            out.push_back(&c);
    }
    return out;
}

const Element* Element::first_element_child() const
{
    return children.empty() ? nullptr : &children.front();
}

const std::string* Element::attribute(std::string_view ns_uri, std::string_view local) const
{
    for (const auto& a : attributes) {
        if (a.ns == ns_uri && a.name == local)
            return &a.value;
    }
    return nullptr;
}

std::string Element::trimmed_text() const
{
    return std::string(text::trim(text));
}

Element parse(std::string_view document)
{
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
        XML_ParserCreateNS("UTF-8", kNsSeparator), &XML_ParserFree);
    if (!parser)
        throw Error(Errc::MalformedXml, "cannot allocate XML parser");
    Builder builder;
    builder.parser = parser.get();
    XML_SetUserData(parser.get(), &builder);
    XML_SetElementHandler(parser.get(), &Builder::on_start, &Builder::on_end);
    XML_SetCharacterDataHandler(parser.get(), &Builder::on_text);
    XML_SetStartNamespaceDeclHandler(parser.get(), &Builder::on_ns_start);

    if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE) == XML_STATUS_ERROR) {
        throw Error(Errc::MalformedXml, std::string("XML error at line ") +
                                            std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
                                            XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
    if (!builder.has_root)
        throw Error(Errc::MalformedXml, "document has no root element");
    return std::move(builder.root);
}

std::string extract(std::string_view document, const Element& element, const std::vector<NamespaceDecl>& inherited)
{
    std::string_view raw = document.substr(element.begin, element.end - element.begin);
    // Inner declarations shadow outer ones with the same prefix.
    std::vector<NamespaceDecl> scope;
    for (const auto& decl : inherited) {
        std::erase_if(scope, [&](const NamespaceDecl& d) { return d.prefix == decl.prefix; });
        scope.push_back(decl);
    }
    std::string extra;
    for (const auto& decl : scope) {
        bool declared = false;
        for (const auto& own : element.declarations)
            declared = declared || own.prefix == decl.prefix;
        if (declared || decl.uri.empty())
            continue;
        extra += decl.prefix.empty() ? std::string(" xmlns=\"") : " xmlns:" + decl.prefix + "=\"";
        extra += escape_attribute(decl.uri);
        extra += '"';
    }
    if (extra.empty())
        return std::string(raw);
    std::size_t name_end = 1;
    while (name_end < raw.size() && raw[name_end] != ' ' && raw[name_end] != '\t' && raw[name_end] != '\n' &&
           raw[name_end] != '\r' && raw[name_end] != '/' && raw[name_end] != '>')
        ++name_end;
    std::string out;
    out.reserve(raw.size() + extra.size());
    out.append(raw.substr(0, name_end));
    out.append(extra);
    out.append(raw.substr(name_end));
    return out;
}

std::string_view strip_prolog(std::string_view document)
{
    if (document.substr(0, 3) == "\xEF\xBB\xBF")
        document.remove_prefix(3);
    if (document.substr(0, 5) == "<?xml") {
        const auto end = document.find("?>");
        if (end != std::string_view::npos)
            document.remove_prefix(end + 2);
    }
    while (!document.empty() && (document.front() == '\n' || document.front() == '\r' || document.front() == ' ' ||
                                 document.front() == '\t'))
        document.remove_prefix(1);
    return document;
}

std::string escape_text(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '\r': out += "&#13;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string escape_attribute(std::string_view s)
{
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\n': out += "&#10;"; break;
        case '\r': out += "&#13;"; break;
        case '\t': out += "&#9;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

} // namespace fedlibre::xml
