"""Registry walkthrough: which URLs count as free-hosted sites?

Free web-hosting services put every customer site under their own domain,
either as a subdomain (paypal-login.weebly.com) or as a path
(sites.google.com/view/...). The registry knows both shapes.
"""

from freephish import canonicalize, default_registry, match_fhd
from freephish.errors import UrlError

registry = default_registry()
print(f"shipped registry: {len(registry)} hosting services")
for entry in list(registry)[:5]:
    print(f"  {entry.name:<14} {entry.base_domain:<22} {entry.subdomain_scheme}")
print("  ...")

# Canonicalization lowercases the host and drops fragments, so equal pages
# compare equal.
url = canonicalize("HTTPS://PayPal-Login.Weebly.COM/account#top")
print(f"\ncanonical form: {url.serialized}")

for raw in ["https://paypal-login.weebly.com/",
            "https://sites.google.com/view/acct-verify",
            "https://weebly.com/",                  # the service itself: no slug
            "https://www.weebly.com/",              # www is not a site name
            "https://self-hosted-phish.com/login"]: # not an FHD at all
    match = match_fhd(canonicalize(raw), registry)
    if match:
        print(f"match    {raw}  ->  {match.entry.name}, slug {match.site_slug!r}")
    else:
        print(f"no match {raw}")

# Strings without a recognizable host are rejected outright.
try:
    canonicalize("notaurl")
except UrlError as exc:
    print(f"\nunparseable input raises: {exc}")
