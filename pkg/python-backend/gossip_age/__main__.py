from gossip_age.cli import main

raise SystemExit(main())
