from . import BUILDERS, fixture_path, write_all

write_all()
for name in BUILDERS:
    print(fixture_path(name))
