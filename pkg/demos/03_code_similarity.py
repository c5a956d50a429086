"""Why template-built phishing looks like template-built benign sites.

Pages made with the same drag-and-drop builder share most of their markup.
The similarity metric works on element start tags: for each tag of page A,
find its best edit-distance match in page B; take the median per direction
and average the two directions.
"""

from freephish.similarity import compare_pages, extract_tags, levenshtein

print("edit distance examples:")
for a, b in [("kitten", "sitting"), ("paypal", "paypa1"), ("abc", "abc")]:
    print(f"  LV({a!r}, {b!r}) = {levenshtein(a, b)}")

TEMPLATE = """
<div class="wsite-section-wrap"><div class="wsite-section-content">
<h2 class="wsite-content-title">{title}</h2>
<div class="paragraph">{text}</div>
<div class="wsite-button"><a class="wsite-button-inner" href="{href}">Go</a></div>
</div></div><div class="wsite-footer">Powered by the builder</div>
"""

benign = TEMPLATE.format(title="Garden diary", text="This week in the beds...",
                         href="/photos")
phishing = TEMPLATE.format(title="Verify your account",
                           text="Unusual sign-in activity detected.",
                           href="https://paypal-login.evil.example/")
handwritten = """
<table border=1><tr><td><b>WELCOME</b></td></tr>
<tr><td><marquee>click below!!</marquee></td></tr></table>
"""

print(f"\ntags per page: template benign={len(extract_tags(benign))}, "
      f"template phishing={len(extract_tags(phishing))}, "
      f"handwritten={len(extract_tags(handwritten))}")

same_template = compare_pages(benign, phishing)
different = compare_pages(benign, handwritten)
print(f"\nbenign vs phishing, same builder: overall {same_template.overall:.3f} "
      f"(A->B {same_template.sim_a_to_b:.3f}, B->A {same_template.sim_b_to_a:.3f})")
print(f"benign vs handwritten page:       overall {different.overall:.3f}")
print("\nhigh similarity across labels is exactly why code-similarity "
      "heuristics miss these attacks.")
