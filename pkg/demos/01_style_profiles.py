"""Style profiles: bundled venues, merging, and round-tripping to disk.

A profile is a bag of min/max envelopes measured from real paper pages:
margins, column geometry, per-class placement slots, fonts, and the
spacing between neighbouring parts. Everything downstream samples inside
these envelopes.
"""

from synthpages import bundled_profile, merge_profiles, save_style_profile
from synthpages.style import load_style_profile, profile_to_dict

acl = bundled_profile("acl")
vis = bundled_profile("vis")
cs150 = bundled_profile("cs150")

print("bundled profiles:")
for p in (acl, vis, cs150):
    total = sum(p.page_type_counts.values())
    print(f"  {p.name:6s} pages={total:5d} "
          f"top_margin=[{p.top_margin.min}, {p.top_margin.max}] "
          f"columns=[{p.column_width.min}, {p.column_width.max}]")

# Merging takes the hull of every numeric range, concatenates font lists,
# and sums the page-type counts, so a merged profile generates the union
# of both venues' layouts.
both = merge_profiles(acl, vis)
print("\nmerged ACL+VIS:")
print("  figures per page:", both.element_counts["figure"].as_list())
print("  column spacing:  ", both.column_spacing.as_list())
print("  title fonts:     ", len(both.fonts["title"]), "variants")

# Profiles are plain YAML; edit one by hand to invent a new venue.
save_style_profile(both, "/tmp/demo_merged.profile")
back = load_style_profile("/tmp/demo_merged.profile")
assert profile_to_dict(back) == profile_to_dict(both)
print("\nround-tripped through /tmp/demo_merged.profile, no drift")
